//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured facts. Everything asserted here is exact — integer
//! counts, exact rational table entries, zero-violation corpus sweeps.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::*;
use itpn::dbm::{firable_dbm, initial_dbm, successor_dbm, DbmIndex};
use itpn::graph::{build, diff_graphs, BuildError, BuildOptions, Method, StateClassGraph};
use itpn::model::fixtures::{FIG1, PERIODIC};
use itpn::model::parse_model;
use itpn::net::{Net, TransId};
use itpn::poly::{exact_ds, firable_exact, run_satisfies_trace, tightest_dbm, PolyError};
use itpn::quant::{path_duration_bounds, replay_bounds, PathQuery};
use itpn::scalar::{int, Bound};
use itpn::sim::random_run;
use itpn::tdis::{class_successor, initial_tdis, firable_tdis, PointId, TdisClass};
use itpn::{Rational, Rational64};

fn fig1() -> Net<Rational> {
    parse_model(FIG1).unwrap()
}

fn t<S: itpn::Scalar>(net: &Net<S>, name: &str) -> TransId {
    net.transition_by_name(name).unwrap()
}

/// The corpus of criteria 5, 6, 9 and 10: at least 100 seeded random nets
/// within the stated envelope (<= 6 places, <= 6 transitions, <= 2
/// inhibitor arcs, integer bounds <= 5), with a dedicated inhibitor-free
/// slice so the TPN-collapse criterion has weight.
fn corpus() -> Vec<(u64, Net<Rational64>)> {
    let mut nets = Vec::new();
    let itpn_cfg = NetGen::default();
    for seed in 0..60u64 {
        nets.push((seed, random_net::<Rational64>(seed, &itpn_cfg)));
    }
    let tpn_cfg = NetGen { max_inhibitors: 0, ..NetGen::default() };
    for seed in 1000..1050u64 {
        nets.push((seed, random_net::<Rational64>(seed, &tpn_cfg)));
    }
    nets
}

const CORPUS_DEPTH: usize = 6;

fn build_graph<S: itpn::Scalar>(
    net: &Net<S>,
    method: Method,
    max_depth: usize,
) -> Option<StateClassGraph<S>> {
    let opts = BuildOptions {
        max_depth,
        max_classes: 20_000,
        ..BuildOptions::method(method)
    };
    match build(net, &opts) {
        Ok(g) => Some(g),
        Err(BuildError::Bounded { partial }) => Some(partial),
        Err(BuildError::Oracle { .. }) => None,
    }
}

/// Criterion 1: the three graph sizes of the bundled example, with the
/// stated wall-clock ceilings.
#[test]
fn acceptance_01_fig1_graph_sizes() {
    let net = fig1();
    let started = Instant::now();
    let tdis = build(&net, &BuildOptions::method(Method::Tdis)).unwrap();
    let dbm = build(&net, &BuildOptions::method(Method::Dbm)).unwrap();
    let approx_time = started.elapsed();
    let exact_started = Instant::now();
    let exact = build(&net, &BuildOptions::method(Method::Exact)).unwrap();
    let exact_time = exact_started.elapsed();

    assert_eq!((tdis.stats.classes, tdis.stats.edges), (19, 25), "tdis size");
    assert_eq!((dbm.stats.classes, dbm.stats.edges), (21, 28), "dbm size");
    assert_eq!((exact.stats.classes, exact.stats.edges), (17, 22), "exact size");
    assert!(approx_time.as_secs_f64() < 1.0, "tdis+dbm took {approx_time:?}");
    assert!(exact_time.as_secs_f64() < 10.0, "exact took {exact_time:?}");
    println!(
        "criterion 1: PASS - tdis 19/25, dbm 21/28, exact 17/22 under equality equivalence \
         (tdis keyed on marking + compact DBM; approx {approx_time:?}, exact {exact_time:?})"
    );
}

/// Expected content of one time-distance class, in path-relative point
/// ids (0, 1, 2, ... in firing order); the golden tables number points
/// by graph node instead (0, 2, 3, 5, 6 / 0, 2, 9), an order-preserving
/// relabeling of these.
struct ClassTable {
    label: &'static str,
    marking: &'static str,
    cols: &'static [&'static str],
    ne: &'static [(&'static str, PointId)],
    ni: &'static [(&'static str, i64)],
    na: &'static [(&'static str, i64)],
    up: &'static [(PointId, &'static [i64])],
    lo: &'static [(PointId, &'static [i64])],
    up_n: &'static [(PointId, i64)],
    lo_n: &'static [(PointId, i64)],
    dc: &'static [&'static [i64]],
}

fn check_class(net: &Net<Rational>, class: &TdisClass<Rational>, table: &ClassTable) {
    let ctx = table.label;
    assert_eq!(net.display_marking(&class.marking), table.marking, "{ctx}: marking");
    let ids: Vec<PointId> = table.up.iter().map(|(i, _)| *i).collect();
    assert_eq!(class.ds.indices(), ids, "{ctx}: retained points");
    for (name, i) in table.ne {
        assert_eq!(class.points.ne[&t(net, name)], *i, "{ctx}: ne({name})");
    }
    for (name, i) in table.ni {
        let expect = (*i >= 0).then_some(*i as PointId);
        assert_eq!(class.points.ni[&t(net, name)], expect, "{ctx}: ni({name})");
    }
    for (name, i) in table.na {
        let expect = (*i >= 0).then_some(*i as PointId);
        assert_eq!(class.points.na[&t(net, name)], expect, "{ctx}: na({name})");
    }
    for (i, vals) in table.up {
        for (name, v) in table.cols.iter().zip(*vals) {
            assert_eq!(*class.ds.up(*i, t(net, name)), Bound::of(*v), "{ctx}: ds[{i},{name}]");
        }
    }
    for (i, vals) in table.lo {
        for (name, v) in table.cols.iter().zip(*vals) {
            assert_eq!(*class.ds.lo(t(net, name), *i), Bound::of(*v), "{ctx}: ds[{name},{i}]");
        }
    }
    for (i, v) in table.up_n {
        assert_eq!(*class.ds.up_n(*i), Bound::of(*v), "{ctx}: ds[{i},n]");
    }
    for (i, v) in table.lo_n {
        assert_eq!(*class.ds.lo_n(*i), Bound::of(*v), "{ctx}: ds[n,{i}]");
    }
    for (x, row) in table.cols.iter().zip(table.dc) {
        for (y, v) in table.cols.iter().zip(*row) {
            assert_eq!(*class.dc.get(t(net, x), t(net, y)), Bound::of(*v), "{ctx}: dc[{x},{y}]");
        }
    }
}

/// Criterion 2: the golden class tables along (t4,t1,t2,t5) and
/// (t4,t1,t5), entry by entry in exact rationals.
#[test]
fn acceptance_02_golden_class_tables() {
    let net = fig1();
    let walk = |path: &[&str]| -> Vec<TdisClass<Rational>> {
        let mut out = vec![initial_tdis(&net)];
        for name in path {
            let tf = t(&net, name);
            let prev = out.last().unwrap();
            assert!(firable_tdis(&net, prev, tf), "{name} must be firable");
            out.push(class_successor(&net, prev, tf));
        }
        out
    };

    // golden point labels 0,2,3,5,6 are path-relative 0,1,2,3,4 here
    let main_path = walk(&["t4", "t1", "t2", "t5"]);
    let tables = [
        ClassTable {
            label: "class after t4 (golden point labels 0,2)",
            marking: "p1,p2,p3,p7",
            cols: &["t1", "t2", "t3", "t7"],
            ne: &[("t1", 0), ("t3", 0), ("t2", 1), ("t7", 1)],
            ni: &[("t1", -1), ("t2", -1), ("t3", 1), ("t7", -1)],
            na: &[("t1", 0), ("t3", 0), ("t2", 1), ("t7", 1)],
            up: &[(0, &[3, 7, 4, 12]), (1, &[3, 5, 4, 10])],
            lo: &[(0, &[-3, -2, -2, -10]), (1, &[-1, -2, 0, -10])],
            up_n: &[(0, 2), (1, 0)],
            lo_n: &[(0, 0), (1, 0)],
            dc: &[&[0, 4, 1, 9], &[1, 0, 2, 8], &[1, 5, 0, 10], &[-7, -5, -6, 0]],
        },
        ClassTable {
            label: "class after t4,t1 (golden labels 0,2,3)",
            marking: "p2,p3,p5,p7",
            cols: &["t2", "t3", "t5", "t7"],
            ne: &[("t2", 1), ("t7", 1), ("t3", 0), ("t5", 2)],
            ni: &[("t2", -1), ("t5", -1), ("t7", -1), ("t3", 1)],
            na: &[("t2", 1), ("t7", 1), ("t3", 0), ("t5", 2)],
            up: &[(0, &[7, 7, 3, 12]), (1, &[5, 7, 3, 10]), (2, &[4, 4, 0, 9])],
            lo: &[(0, &[-3, -3, -3, -10]), (1, &[-2, -1, -1, -10]), (2, &[0, 0, 0, -7])],
            up_n: &[(0, 3), (1, 3), (2, 0)],
            lo_n: &[(0, -3), (1, -1), (2, 0)],
            dc: &[&[0, 4, 0, 8], &[4, 0, 0, 9], &[4, 4, 0, 9], &[-5, -3, -7, 0]],
        },
        ClassTable {
            label: "class after t4,t1,t2 (golden labels 0,2,3,5)",
            marking: "p3,p5,p7",
            cols: &["t3", "t5", "t7"],
            ne: &[("t7", 1), ("t3", 0), ("t5", 2)],
            ni: &[("t5", -1), ("t7", -1), ("t3", 1)],
            na: &[("t7", 1), ("t3", 0), ("t5", 2)],
            up: &[(0, &[7, 3, 11]), (1, &[7, 3, 10]), (2, &[4, 0, 8]), (3, &[4, 0, 8])],
            lo: &[(0, &[-4, -3, -10]), (1, &[-2, -2, -10]), (2, &[0, 0, -7]), (3, &[-1, 0, -7])],
            up_n: &[(0, 3), (1, 3), (2, 0), (3, 0)],
            lo_n: &[(0, -3), (1, -2), (2, 0), (3, 0)],
            dc: &[&[0, -1, 7], &[4, 0, 8], &[-3, -7, 0]],
        },
        ClassTable {
            label: "class after t4,t1,t2,t5 (golden labels 0,2,6)",
            marking: "p3,p6",
            cols: &["t3", "t6"],
            ne: &[("t3", 0), ("t6", 4)],
            ni: &[("t3", 1), ("t6", -1)],
            na: &[("t3", 4), ("t6", 4)],
            up: &[(0, &[7, 3]), (1, &[7, 3]), (4, &[4, 0])],
            lo: &[(0, &[-4, -3]), (1, &[-2, -2]), (4, &[-1, 0])],
            up_n: &[(0, 3), (1, 3), (4, 0)],
            lo_n: &[(0, -3), (1, -2), (4, 0)],
            dc: &[&[0, -1], &[4, 0]],
        },
    ];
    for (class, table) in main_path[1..].iter().zip(&tables) {
        check_class(&net, class, table);
    }

    let alt_path = walk(&["t4", "t1", "t5"]);
    check_class(
        &net,
        &alt_path[3],
        &ClassTable {
            label: "class after t4,t1,t5 (golden labels 0,2,9)",
            marking: "p2,p3,p6",
            cols: &["t2", "t3", "t6"],
            ne: &[("t3", 0), ("t2", 1), ("t6", 3)],
            ni: &[("t2", -1), ("t6", -1), ("t3", 1)],
            na: &[("t3", 3), ("t6", 3), ("t2", 1)],
            up: &[(0, &[7, 7, 3]), (1, &[5, 7, 3]), (3, &[4, 4, 0])],
            lo: &[(0, &[-3, -3, -3]), (1, &[-2, -1, -1]), (3, &[0, 0, 0])],
            up_n: &[(0, 3), (1, 3), (3, 0)],
            lo_n: &[(0, -3), (1, -1), (3, 0)],
            dc: &[&[0, 4, 0], &[4, 0, 0], &[4, 4, 0]],
        },
    );

    // the singled-out tightenings
    let c5 = &main_path[3];
    assert_eq!(*c5.ds.lo(t(&net, "t3"), 0), Bound::of(-4));
    assert_eq!(*c5.dc.get(t(&net, "t3"), t(&net, "t5")), Bound::of(-1));
    println!("criterion 2: PASS - five golden classes reproduced entry by entry");
}

/// Criterion 3: the initial matrices of both engines.
#[test]
fn acceptance_03_initial_fixtures() {
    let net = fig1();
    let dbm = initial_dbm(&net);
    let expect = [
        (".", [0i64, 3, 4, 2]),
        ("t1", [-3, 0, 1, -1]),
        ("t3", [-2, 1, 0, 0]),
        ("t4", [0, 3, 4, 0]),
    ];
    let idx = |n: &str| {
        if n == "." {
            DbmIndex::Entry
        } else {
            DbmIndex::Trans(t(&net, n))
        }
    };
    for (x, row) in expect {
        for (y, v) in [".", "t1", "t3", "t4"].iter().zip(row) {
            assert_eq!(*dbm.matrix.get(idx(x), idx(y)), Bound::of(v), "initial dbm [{x},{y}]");
        }
    }

    let tdis = initial_tdis(&net);
    assert_eq!(tdis.ds.indices(), vec![0]);
    for (name, up, lo) in [("t1", 3, -3), ("t3", 4, -2), ("t4", 2, 0)] {
        assert_eq!(*tdis.ds.up(0, t(&net, name)), Bound::of(up));
        assert_eq!(*tdis.ds.lo(t(&net, name), 0), Bound::of(lo));
    }
    assert_eq!(*tdis.ds.up_n(0), Bound::of(0));
    assert_eq!(*tdis.ds.lo_n(0), Bound::of(0));
    println!("criterion 3: PASS - initial dbm and time-distance tables exact");
}

/// Criterion 4: the overapproximation narrative along (t4,t1,t2,t5) —
/// the dbm chain admits firing both t3 and t6 at the end while the exact
/// class refuses t3.
#[test]
fn acceptance_04_dbm_narrative() {
    let net = fig1();
    let names = ["t4", "t1", "t2", "t5"];
    let mut dbm = initial_dbm(&net);
    let mut exact = itpn::poly::initial_exact(&net).unwrap();
    let idx = |n: &str| {
        if n == "." {
            DbmIndex::Entry
        } else {
            DbmIndex::Trans(t(&net, n))
        }
    };
    let mut seen = Vec::new();
    for name in names {
        dbm = successor_dbm(&net, &dbm, t(&net, name));
        exact = itpn::poly::exact_successor(&net, &exact, t(&net, name)).unwrap();
        seen.push(name);
        match seen.as_slice() {
            ["t4", "t1"] => {
                for (x, y, v) in [
                    (".", "t5", 0),
                    ("t5", ".", 0),
                    ("t7", "t2", -5),
                    ("t2", "t7", 8),
                    (".", "t7", 9),
                    ("t7", ".", -7),
                    ("t2", ".", 0),
                    (".", "t3", 4),
                    ("t3", ".", 0),
                ] {
                    assert_eq!(*dbm.matrix.get(idx(x), idx(y)), Bound::of(v), "D after t4,t1 [{x},{y}]");
                }
            }
            ["t4", "t1", "t2"] => {
                for (x, y, v) in [
                    (".", "t5", 0),
                    ("t7", "t5", -7),
                    ("t5", "t7", 8),
                    (".", "t7", 8),
                    ("t7", ".", -7),
                    (".", "t3", 4),
                    ("t3", ".", 0),
                ] {
                    assert_eq!(*dbm.matrix.get(idx(x), idx(y)), Bound::of(v), "D' [{x},{y}]");
                }
            }
            ["t4", "t1", "t2", "t5"] => {
                for (x, y, v) in [(".", "t6", 0), ("t6", ".", 0), (".", "t3", 4), ("t3", ".", 0)] {
                    assert_eq!(*dbm.matrix.get(idx(x), idx(y)), Bound::of(v), "D'' [{x},{y}]");
                }
            }
            _ => {}
        }
    }
    // both transitions pass the dbm firing test on D''
    assert!(firable_dbm(&net, &dbm, t(&net, "t3")));
    assert!(firable_dbm(&net, &dbm, t(&net, "t6")));
    // the exact class fires only t6: D'' with t3 <= t6 is inconsistent
    assert!(!firable_exact(&net, &exact, t(&net, "t3")).unwrap());
    assert!(firable_exact(&net, &exact, t(&net, "t6")).unwrap());
    let tight = tightest_dbm(&exact.system).unwrap();
    assert_eq!(*tight.get(idx("t3"), idx(".")), Bound::of(-1), "exact min residual of t3");
    println!("criterion 4: PASS - dbm chain admits (t3,t6), exact class fires only t6");
}

/// Criterion 5: the approximation chain on the corpus — for every
/// exact-firable sequence to depth 6, tightest exact DBM <= tdis <= dbm
/// entrywise, and exact time distances <= tdis time distances.
#[test]
fn acceptance_05_approximation_chain_on_corpus() {
    let mut nets_checked = 0usize;
    let mut sequences = 0usize;
    for (seed, net) in corpus() {
        let mut tdis_stack = vec![initial_tdis(&net)];
        let mut dbm_stack = vec![initial_dbm(&net)];
        let walked = walk_exact::<Rational64, _>(&net, CORPUS_DEPTH, &mut |labels, class, trace| {
            while tdis_stack.len() > labels.len().max(1) {
                tdis_stack.pop();
                dbm_stack.pop();
            }
            if tdis_stack.len() < labels.len() + 1 {
                let tf = *labels.last().unwrap();
                let tprev = tdis_stack.last().unwrap().clone();
                assert!(firable_tdis(&net, &tprev, tf), "exact-firable implies tdis-firable");
                tdis_stack.push(class_successor(&net, &tprev, tf));
                let dprev = dbm_stack.last().unwrap().clone();
                assert!(firable_dbm(&net, &dprev, tf), "exact-firable implies dbm-firable");
                dbm_stack.push(successor_dbm(&net, &dprev, tf));
            }
            sequences += 1;
            let tdis_class = tdis_stack.last().unwrap();
            let dbm_class = dbm_stack.last().unwrap();
            let tight = tightest_dbm(&class.system)?;
            if let Err(msg) = check_matrix_chain(&net, &tight, tdis_class, dbm_class) {
                panic!("seed {seed}, sequence {}: {msg}", seq_names(&net, labels));
            }
            let ds = exact_ds(&net, trace, &tdis_class.points)?;
            assert!(
                ds.dominated_by(&tdis_class.ds),
                "seed {seed}, sequence {}: exact distance exceeds approximated",
                seq_names(&net, labels)
            );
            Ok(())
        });
        match walked {
            Ok(()) => nets_checked += 1,
            Err(PolyError::Budget(_)) => {} // oracle refused this net, by design
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    assert!(nets_checked >= 100, "only {nets_checked} corpus nets within oracle budget");
    println!(
        "criterion 5: PASS - {nets_checked} nets, {sequences} sequences, zero chain violations"
    );
}

/// Criterion 6: language inclusion exact ⊆ tdis ⊆ dbm at depth <= 6 on
/// the corpus; for inhibitor-free nets the three graphs are isomorphic
/// with identical matrices.
#[test]
fn acceptance_06_language_inclusion() {
    let mut nets_checked = 0usize;
    let mut tpn_checked = 0usize;
    for (seed, net) in corpus() {
        let Some(exact) = build_graph(&net, Method::Exact, CORPUS_DEPTH) else {
            continue;
        };
        let dbm = build_graph(&net, Method::Dbm, CORPUS_DEPTH).unwrap();
        let tdis = build_graph(&net, Method::Tdis, CORPUS_DEPTH).unwrap();
        for d in 1..=CORPUS_DEPTH {
            let et = diff_graphs(&exact, &tdis, d);
            assert!(
                et.only_in_first.is_empty(),
                "seed {seed}: exact sequence missing from tdis at depth {d}"
            );
            let td = diff_graphs(&tdis, &dbm, d);
            assert!(
                td.only_in_first.is_empty(),
                "seed {seed}: tdis sequence missing from dbm at depth {d}"
            );
        }
        nets_checked += 1;
        if net.has_inhibitors() {
            continue;
        }
        // inhibitor-free: the three graphs are isomorphic with identical
        // matrices; walk the node correspondence breadth-first
        tpn_checked += 1;
        assert_eq!(exact.stats.classes, dbm.stats.classes, "seed {seed}: class counts");
        assert_eq!(dbm.stats.classes, tdis.stats.classes, "seed {seed}: class counts");
        assert_eq!(exact.stats.edges, dbm.stats.edges, "seed {seed}: edge counts");
        assert_eq!(dbm.stats.edges, tdis.stats.edges, "seed {seed}: edge counts");
        let mut paired = vec![None; dbm.nodes.len()];
        paired[0] = Some((0usize, 0usize));
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(d_node) = queue.pop_front() {
            let (e_node, t_node) = paired[d_node].unwrap();
            let d_class = dbm.nodes[d_node].as_dbm().unwrap();
            let t_class = tdis.nodes[t_node].as_tdis().unwrap();
            let e_class = exact.nodes[e_node].as_exact().unwrap();
            let tight = tightest_dbm(&e_class.system).unwrap();
            assert_eq!(tight, d_class.matrix, "seed {seed}: exact matrix differs");
            for &x in d_class.matrix.transitions() {
                assert_eq!(
                    d_class.matrix.get(DbmIndex::Entry, DbmIndex::Trans(x)),
                    t_class.upper(x),
                    "seed {seed}: upper bound differs"
                );
                assert_eq!(
                    d_class.matrix.get(DbmIndex::Trans(x), DbmIndex::Entry),
                    t_class.lower(x),
                    "seed {seed}: lower bound differs"
                );
                for &y in d_class.matrix.transitions() {
                    if x != y {
                        assert_eq!(
                            d_class.matrix.get(DbmIndex::Trans(x), DbmIndex::Trans(y)),
                            t_class.dc.get(x, y),
                            "seed {seed}: pair bound differs"
                        );
                    }
                }
            }
            let d_out: Vec<_> = dbm.outgoing(d_node).collect();
            let e_out: Vec<_> = exact.outgoing(e_node).collect();
            let t_out: Vec<_> = tdis.outgoing(t_node).collect();
            let labels: Vec<TransId> = d_out.iter().map(|e| e.trans).collect();
            assert_eq!(labels, e_out.iter().map(|e| e.trans).collect::<Vec<_>>());
            assert_eq!(labels, t_out.iter().map(|e| e.trans).collect::<Vec<_>>());
            for ((de, ee), te) in d_out.iter().zip(&e_out).zip(&t_out) {
                match paired[de.dst] {
                    None => {
                        paired[de.dst] = Some((ee.dst, te.dst));
                        queue.push_back(de.dst);
                    }
                    Some(pair) => assert_eq!(pair, (ee.dst, te.dst), "seed {seed}: not a bijection"),
                }
            }
        }
    }
    assert!(nets_checked >= 100, "only {nets_checked} corpus nets comparable");
    assert!(tpn_checked >= 40, "only {tpn_checked} inhibitor-free nets");
    println!(
        "criterion 6: PASS - inclusion on {nets_checked} nets, {tpn_checked} inhibitor-free isomorphic"
    );
}

/// Criterion 7: 1000 random timed runs per fixture net replay as paths of
/// all three graphs and satisfy the exact systems step by step.
#[test]
fn acceptance_07_simulator_soundness() {
    for (name, text) in [("fig1", FIG1), ("periodic", PERIODIC)] {
        let net: Net<Rational64> = parse_model(text).unwrap();
        let graphs = [
            build(&net, &BuildOptions::method(Method::Exact)).unwrap(),
            build(&net, &BuildOptions::method(Method::Dbm)).unwrap(),
            build(&net, &BuildOptions::method(Method::Tdis)).unwrap(),
        ];
        for seed in 0..1000u64 {
            let run = random_run(&net, 20, seed);
            let labels: Vec<TransId> = run.steps.iter().map(|(t, _)| *t).collect();
            for g in &graphs {
                assert!(
                    g.contains_path(&labels),
                    "{name} seed {seed}: run {} not a path of the {:?} graph",
                    seq_names(&net, &labels),
                    g.method
                );
            }
            assert!(
                run_satisfies_trace(&net, &run.steps).unwrap(),
                "{name} seed {seed}: concrete delays violate the exact systems"
            );
        }
    }
    println!("criterion 7: PASS - 2x1000 runs replay in all graphs and satisfy the oracle");
}

/// Criterion 8: Fourier–Motzkin projections agree with the sampling
/// oracle on 50 random systems, 200 points each.
#[test]
fn acceptance_08_fm_correctness() {
    let mut points = 0usize;
    for seed in 0..50u64 {
        let sys = random_system::<Rational>(seed);
        let victim = sys.vars()[seed as usize % sys.vars().len()];
        points += check_projection_by_sampling(&sys, victim, 200, seed ^ 0xf00d)
            .unwrap_or_else(|msg| panic!("seed {seed}: {msg}"));
    }
    assert_eq!(points, 10_000);
    println!("criterion 8: PASS - 50 systems x 200 sample points, zero disagreements");
}

/// Criterion 9: the golden duration bounds, plus the metamorphic check
/// that re-extension agrees with direct table reads wherever the origin
/// is retained.
#[test]
fn acceptance_09_quantitative_bounds() {
    let net = fig1();
    let graph = build(&net, &BuildOptions::method(Method::Tdis)).unwrap();
    let path = |names: &[&str]| PathQuery {
        start: 0,
        transitions: names.iter().map(|n| t(&net, n)).collect(),
        origin: 0,
    };
    assert_eq!(
        path_duration_bounds(&net, &graph, &path(&["t4", "t1", "t2", "t5"])).unwrap(),
        (int(3), Bound::of(3))
    );
    assert_eq!(
        path_duration_bounds(&net, &graph, &path(&["t4"])).unwrap(),
        (int(0), Bound::of(2))
    );

    // metamorphic sweep: wherever point 0 survives to the end of a
    // sequence, the forced re-extension returns the direct table values
    let mut agreements = 0usize;
    for (seed, net) in corpus() {
        walk_tdis::<Rational64, _>(&net, 5, &mut |labels, classes| {
            if labels.is_empty() {
                return;
            }
            let terminal = classes.last().unwrap();
            if !terminal.ds.indices().contains(&0) {
                return;
            }
            let direct = (
                -terminal.ds.lo_n(0).expect_finite().clone(),
                terminal.ds.up_n(0).clone(),
            );
            let replayed = replay_bounds(&net, &classes[0], 0, labels).unwrap();
            assert_eq!(replayed, direct, "seed {seed}, sequence {}", seq_names(&net, labels));
            agreements += 1;
        });
    }
    assert!(agreements > 300, "only {agreements} metamorphic comparisons");
    println!("criterion 9: PASS - [3,3] and [0,2] exact; {agreements} re-extension agreements");
}

/// Criterion 10: response-time estimation quality, checked as WCRT
/// monotonicity — dbm >= tdis >= exact on the corpus for every task pair
/// with finite values (full-scale benchmark models are not available at
/// desk scale, so the ordering is the substituted check).
#[test]
fn acceptance_10_wcrt_monotonicity() {
    type Window = (usize, usize);
    let mut pairs_checked = 0usize;
    let mut nets_checked = 0usize;
    for (seed, net) in corpus() {
        // per task pair, worst upper bound seen per method
        let mut exact_wcrt: BTreeMap<(TransId, TransId), Bound<Rational64>> = BTreeMap::new();
        let mut tdis_wcrt: BTreeMap<(TransId, TransId), Bound<Rational64>> = BTreeMap::new();
        let mut dbm_wcrt: BTreeMap<(TransId, TransId), Bound<Rational64>> = BTreeMap::new();

        let record = |map: &mut BTreeMap<(TransId, TransId), Bound<Rational64>>,
                      key: (TransId, TransId),
                      hi: Bound<Rational64>| {
            map.entry(key)
                .and_modify(|w| {
                    if hi > *w {
                        *w = hi.clone();
                    }
                })
                .or_insert(hi);
        };
        // windows ending at the last position of each enumerated sequence,
        // so each window is measured exactly once
        let ending_windows = |labels: &[TransId]| -> Vec<Window> {
            let mut out = Vec::new();
            if labels.is_empty() {
                return out;
            }
            let b = labels.len() - 1;
            for a in 0..b {
                let end = labels[b];
                if labels[a + 1..b].iter().all(|&u| u != end) {
                    out.push((a, b));
                }
            }
            out
        };

        let walked = walk_exact::<Rational64, _>(&net, CORPUS_DEPTH, &mut |labels, _c, trace| {
            for (a, b) in ending_windows(labels) {
                let (_, hi) = exact_window_bounds(trace, a + 1, b + 1)?;
                record(&mut exact_wcrt, (labels[a], labels[b]), hi);
            }
            Ok(())
        });
        if walked.is_err() {
            continue; // oracle refused this net, by design
        }
        walk_tdis::<Rational64, _>(&net, CORPUS_DEPTH, &mut |labels, classes| {
            for (a, b) in ending_windows(labels) {
                let start_class = &classes[a + 1];
                let (_, hi) = replay_bounds(
                    &net,
                    start_class,
                    start_class.ds.cur(),
                    &labels[a + 1..=b],
                )
                .unwrap();
                record(&mut tdis_wcrt, (labels[a], labels[b]), hi);
            }
        });
        walk_dbm::<Rational64, _>(&net, CORPUS_DEPTH, &mut |labels, classes| {
            for (a, b) in ending_windows(labels) {
                let (_, hi) = dbm_window_bounds(&net, classes, labels, a + 1, b + 1);
                record(&mut dbm_wcrt, (labels[a], labels[b]), hi);
            }
        });

        nets_checked += 1;
        for (pair, exact_hi) in &exact_wcrt {
            let (Some(tdis_hi), Some(dbm_hi)) = (tdis_wcrt.get(pair), dbm_wcrt.get(pair)) else {
                panic!("seed {seed}: window of exact graph missing from an approximation");
            };
            if !exact_hi.is_finite() || !tdis_hi.is_finite() || !dbm_hi.is_finite() {
                continue;
            }
            assert!(
                exact_hi <= tdis_hi && tdis_hi <= dbm_hi,
                "seed {seed}, pair {:?}: exact {exact_hi} / tdis {tdis_hi} / dbm {dbm_hi}",
                pair
            );
            pairs_checked += 1;
        }
    }
    assert!(nets_checked >= 100, "only {nets_checked} nets within budget");
    assert!(pairs_checked > 300, "only {pairs_checked} task pairs compared");
    println!(
        "criterion 10: PASS - wcrt(dbm) >= wcrt(tdis) >= wcrt(exact) on {pairs_checked} task pairs over {nets_checked} nets"
    );
}
