//! The `.itpn` model text format: parsing and printing.
//!
//! Line-oriented grammar (blank lines and `#` comments ignored):
//!
//! ```text
//! place <name> [<initial-tokens>]       # token count defaults to 0
//! trans <name> [<tmin>,<tmax|inf>]      # literal brackets, e.g. [2,5]
//! arc <place> -> <trans> [<weight>]     # weight defaults to 1
//! arc <trans> -> <place> [<weight>]
//! inhibit <place> -o <trans> [<weight>]
//! ```
//!
//! Interval bounds are decimal rationals (`2`, `0.5`); `inf` is the open
//! upper bound. Printing a parsed net and re-parsing it yields the same net.

use crate::net::{Net, NetBuilder, NetError};
use crate::scalar::{int, Bound, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown identifier `{name}`")]
    Unknown { line: usize, name: String },
    #[error("line {line}: {source}")]
    Net { line: usize, source: NetError },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Parses a nonnegative decimal rational such as `3`, `2.5` or `0.75`.
fn parse_decimal<S: Scalar>(text: &str, line: usize) -> Result<S, ParseError> {
    let (ipart, fpart) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if ipart.is_empty() && fpart.is_empty() {
        return Err(syntax(line, format!("bad number `{text}`")));
    }
    let mut digits = 0usize;
    let mut value = S::zero();
    let ten = int::<S>(10);
    for (part, frac) in [(ipart, false), (fpart, true)] {
        for c in part.chars() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| syntax(line, format!("bad number `{text}`")))?;
            value = value * ten.clone() + int::<S>(d as i64);
            if frac {
                digits += 1;
            }
        }
    }
    let mut den = S::one();
    for _ in 0..digits {
        den = den * ten.clone();
    }
    Ok(value / den)
}

fn parse_interval<S: Scalar>(text: &str, line: usize) -> Result<(S, Bound<S>), ParseError> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| syntax(line, format!("expected `[tmin,tmax]`, got `{text}`")))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| syntax(line, format!("expected `[tmin,tmax]`, got `{text}`")))?;
    let tmin = parse_decimal(lo.trim(), line)?;
    let tmax = match hi.trim() {
        "inf" => Bound::Infinity,
        v => Bound::Finite(parse_decimal(v, line)?),
    };
    if let Bound::Finite(max) = &tmax {
        if &tmin > max {
            return Err(syntax(line, "empty static interval"));
        }
    }
    Ok((tmin, tmax))
}

/// Parses the `.itpn` text format into a net.
pub fn parse_model<S: Scalar>(text: &str) -> Result<Net<S>, ParseError> {
    let mut builder = NetBuilder::new();
    let mut places = std::collections::HashMap::new();
    let mut transitions = std::collections::HashMap::new();
    struct PendingArc {
        line: usize,
        from: String,
        to: String,
        weight: u64,
        inhibitor: bool,
    }
    let mut arcs: Vec<PendingArc> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "place" => {
                let name = *fields
                    .get(1)
                    .ok_or_else(|| syntax(line, "place needs a name"))?;
                let tokens = match fields.get(2) {
                    None => 0,
                    Some(v) => v
                        .parse::<u64>()
                        .map_err(|_| syntax(line, format!("bad token count `{v}`")))?,
                };
                if fields.len() > 3 {
                    return Err(syntax(line, "trailing fields after place"));
                }
                if places.contains_key(name) || transitions.contains_key(name) {
                    return Err(ParseError::Net {
                        line,
                        source: NetError::DuplicateName(name.to_string()),
                    });
                }
                places.insert(name.to_string(), builder.place(name, tokens));
            }
            "trans" => {
                let name = *fields
                    .get(1)
                    .ok_or_else(|| syntax(line, "trans needs a name"))?;
                let interval = fields
                    .get(2..)
                    .filter(|rest| !rest.is_empty())
                    .map(|rest| rest.join(""))
                    .ok_or_else(|| syntax(line, "trans needs an interval"))?;
                let (tmin, tmax) = parse_interval(&interval, line)?;
                if places.contains_key(name) || transitions.contains_key(name) {
                    return Err(ParseError::Net {
                        line,
                        source: NetError::DuplicateName(name.to_string()),
                    });
                }
                transitions.insert(name.to_string(), builder.transition(name, tmin, tmax));
            }
            "arc" | "inhibit" => {
                let inhibitor = fields[0] == "inhibit";
                let sep = if inhibitor { "-o" } else { "->" };
                if fields.len() < 4 || fields[2] != sep {
                    return Err(syntax(line, format!("expected `{} A {} B [w]`", fields[0], sep)));
                }
                let weight = match fields.get(4) {
                    None => 1,
                    Some(v) => v
                        .parse::<u64>()
                        .map_err(|_| syntax(line, format!("bad weight `{v}`")))?,
                };
                arcs.push(PendingArc {
                    line,
                    from: fields[1].to_string(),
                    to: fields[3].to_string(),
                    weight,
                    inhibitor,
                });
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    for arc in arcs {
        if arc.inhibitor {
            let p = *places.get(&arc.from).ok_or_else(|| ParseError::Unknown {
                line: arc.line,
                name: arc.from.clone(),
            })?;
            let t = *transitions.get(&arc.to).ok_or_else(|| ParseError::Unknown {
                line: arc.line,
                name: arc.to.clone(),
            })?;
            builder.inhibitor(p, t, arc.weight);
        } else if let Some(&p) = places.get(&arc.from) {
            let t = *transitions.get(&arc.to).ok_or_else(|| ParseError::Unknown {
                line: arc.line,
                name: arc.to.clone(),
            })?;
            builder.input(p, t, arc.weight);
        } else if let Some(&t) = transitions.get(&arc.from) {
            let p = *places.get(&arc.to).ok_or_else(|| ParseError::Unknown {
                line: arc.line,
                name: arc.to.clone(),
            })?;
            builder.output(t, p, arc.weight);
        } else {
            return Err(ParseError::Unknown { line: arc.line, name: arc.from });
        }
    }

    builder.build().map_err(|source| ParseError::Net { line: 0, source })
}

/// Prints a net in the `.itpn` format; `parse_model(print_model(net))`
/// reproduces the net structurally.
pub fn print_model<S: Scalar>(net: &Net<S>) -> String {
    let mut out = String::new();
    let m0 = net.initial_marking();
    for p in net.places() {
        let tokens = m0.tokens(p);
        if tokens == 0 {
            out.push_str(&format!("place {}\n", net.place_name(p)));
        } else {
            out.push_str(&format!("place {} {}\n", net.place_name(p), tokens));
        }
    }
    for t in net.transitions() {
        let def = net.transition(t);
        out.push_str(&format!("trans {} [{},{}]\n", def.name, def.tmin, def.tmax));
    }
    for t in net.transitions() {
        let def = net.transition(t);
        for &(p, w) in &def.pre {
            if w == 1 {
                out.push_str(&format!("arc {} -> {}\n", net.place_name(p), def.name));
            } else {
                out.push_str(&format!("arc {} -> {} {}\n", net.place_name(p), def.name, w));
            }
        }
        for &(p, w) in &def.post {
            if w == 1 {
                out.push_str(&format!("arc {} -> {}\n", def.name, net.place_name(p)));
            } else {
                out.push_str(&format!("arc {} -> {} {}\n", def.name, net.place_name(p), w));
            }
        }
        for &(p, w) in &def.inhibitors {
            if w == 1 {
                out.push_str(&format!("inhibit {} -o {}\n", net.place_name(p), def.name));
            } else {
                out.push_str(&format!("inhibit {} -o {} {}\n", net.place_name(p), def.name, w));
            }
        }
    }
    out
}

/// Bundled example models.
pub mod fixtures {
    /// Seven-place preemption example: `t3` is suspended while `p7` is
    /// marked, which happens between the firings of `t4` and of `t5`/`t7`.
    pub const FIG1: &str = include_str!("../fixtures/fig1.itpn");

    /// Two-task cyclic net without inhibitor arcs.
    pub const PERIODIC: &str = include_str!("../fixtures/periodic.itpn");
}
