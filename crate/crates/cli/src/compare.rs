//! The `compare` command: two diagnostics files side by side.

use std::fmt::Write;

use anyhow::{bail, Result};
use vlasov::prelude::*;

/// Records of two runs taken at the same times.
#[derive(Debug, Clone)]
pub struct Aligned {
    pub a: Vec<InvariantRecord>,
    pub b: Vec<InvariantRecord>,
}

/// Pairs up records whose times agree to `1e-9` relative.
pub fn align(a: &[InvariantRecord], b: &[InvariantRecord]) -> Result<Aligned> {
    let same = |s: f64, t: f64| (s - t).abs() <= 1e-9 * s.abs().max(t.abs()).max(1.0);
    let (mut i, mut j) = (0, 0);
    let mut out = Aligned { a: Vec::new(), b: Vec::new() };
    while i < a.len() && j < b.len() {
        if same(a[i].t, b[j].t) {
            out.a.push(a[i]);
            out.b.push(b[j]);
            i += 1;
            j += 1;
        } else if a[i].t < b[j].t {
            i += 1;
        } else {
            j += 1;
        }
    }
    if out.a.is_empty() {
        bail!("the two runs share no record times");
    }
    Ok(out)
}

/// Per-invariant summary over the aligned records.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub invariant: Invariant,
    /// Largest error relative to each run's own first record.
    pub error_a: f64,
    pub error_b: f64,
    /// Largest `|a − b|` and where it occurs.
    pub max_deviation: f64,
    pub at: f64,
}

pub fn summarize(aligned: &Aligned) -> Vec<Row> {
    let ea = error_series(&aligned.a, ErrorOptions::default());
    let eb = error_series(&aligned.b, ErrorOptions::default());
    Invariant::ALL
        .iter()
        .map(|&inv| {
            let (mut max_deviation, mut at) = (0.0, aligned.a[0].t);
            for (ra, rb) in aligned.a.iter().zip(&aligned.b) {
                let d = (inv.value(ra) - inv.value(rb)).abs();
                if d > max_deviation {
                    (max_deviation, at) = (d, ra.t);
                }
            }
            Row {
                invariant: inv,
                error_a: ea.max(inv),
                error_b: eb.max(inv),
                max_deviation,
                at,
            }
        })
        .collect()
}

pub fn render_summary(rows: &[Row], n_aligned: usize) -> String {
    let mut s = format!("{n_aligned} aligned records\n");
    writeln!(s, "{:<14}{:>14}{:>14}{:>16}{:>12}", "invariant", "max err A", "max err B", "max |A - B|", "at t").unwrap();
    for r in rows {
        writeln!(
            s,
            "{:<14}{:>14.3e}{:>14.3e}{:>16.3e}{:>12.3}",
            r.invariant.name(),
            r.error_a,
            r.error_b,
            r.max_deviation,
            r.at
        )
        .unwrap();
    }
    s
}

/// Time-resolved errors of one invariant, every `every`-th aligned record.
pub fn render_table(aligned: &Aligned, invariant: Invariant, every: usize) -> String {
    let ea = error_series(&aligned.a, ErrorOptions::default());
    let eb = error_series(&aligned.b, ErrorOptions::default());
    let (sa, sb) = (ea.get(invariant), eb.get(invariant));
    let mut s = format!("{}\n", invariant.name());
    writeln!(s, "{:>12}{:>20}{:>20}{:>14}{:>14}", "t", "A", "B", "err A", "err B").unwrap();
    let n = aligned.a.len();
    for k in (0..n).filter(|k| k % every.max(1) == 0 || *k == n - 1) {
        writeln!(
            s,
            "{:>12.4}{:>20.12e}{:>20.12e}{:>14.3e}{:>14.3e}",
            aligned.a[k].t,
            invariant.value(&aligned.a[k]),
            invariant.value(&aligned.b[k]),
            sa[k],
            sb[k]
        )
        .unwrap();
    }
    s
}

pub fn parse_invariant(name: &str) -> Result<Invariant> {
    match Invariant::ALL.iter().find(|i| i.name() == name) {
        Some(i) => Ok(*i),
        None => {
            let known: Vec<&str> = Invariant::ALL.iter().map(|i| i.name()).collect();
            bail!("unknown invariant `{name}` (known: {})", known.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, mass: f64) -> InvariantRecord {
        InvariantRecord {
            t,
            mass,
            current: 0.0,
            kinetic: 1.0,
            electric: 0.5,
            total_energy: 1.5,
            entropy: 2.0,
            l1: mass,
            l2: 1.0,
            min_value: 0.0,
        }
    }

    #[test]
    fn alignment_skips_unmatched_times() {
        let a = [rec(0.0, 1.0), rec(0.5, 1.0), rec(1.0, 1.0)];
        let b = [rec(0.0, 1.0), rec(1.0, 2.0)];
        let al = align(&a, &b).unwrap();
        assert_eq!(al.a.len(), 2);
        let rows = summarize(&al);
        let mass = rows.iter().find(|r| r.invariant == Invariant::Mass).unwrap();
        assert_eq!((mass.max_deviation, mass.at, mass.error_a, mass.error_b), (1.0, 1.0, 0.0, 1.0));
        assert!(align(&a[1..2], &b).is_err());
    }

    #[test]
    fn invariant_names_parse() {
        for inv in Invariant::ALL {
            assert_eq!(parse_invariant(inv.name()).unwrap(), inv);
        }
        assert!(parse_invariant("momentum").is_err());
    }
}
