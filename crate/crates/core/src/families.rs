//! Named Cayley-graph families: hypercube, halved and folded cubes on Z_2^n, Hamming
//! graphs, complete graphs and circulants.

use crate::cayley::{CayleyGraph, GeneratingSet};
use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Q_n on Z_2^n with S = {ε_i}.
    Hypercube(usize),
    /// ½Q_{n+1} on Z_2^n with S = {ε_i} ∪ {ε_i + ε_j}.
    Halved(usize),
    /// FQ_{n+1} on Z_2^n with S = {ε_i} ∪ {ι}.
    Folded(usize),
    /// H(n,m) on Z_m^n with S = {a·ε_i : a ≠ 0}.
    Hamming { n: usize, m: u64 },
    /// K_m on Z_m with S = Z_m \ {0}.
    Complete(u64),
    /// Cay(Z_m, S).
    Circulant { m: u64, gens: Vec<i64> },
}

fn positive(text: &str, what: &str) -> Result<u64> {
    let v: i64 = text
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{what}: expected an integer, got {text:?}")))?;
    if v <= 0 {
        return invalid(format!("{what} must be positive, got {v}"));
    }
    Ok(v as u64)
}

impl Family {
    /// Parses "hypercube:n", "halved:n", "folded:n", "hamming:n,m" (or n:m), "complete:m",
    /// "circulant:m,(s1;s2;…)" (or m:s1;s2).
    pub fn parse(spec: &str) -> Result<Family> {
        let (name, params) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("family {spec:?} needs parameters, e.g. hypercube:3")))?;
        match name.trim() {
            "hypercube" => Ok(Family::Hypercube(positive(params, "hypercube n")? as usize)),
            "halved" => Ok(Family::Halved(positive(params, "halved n")? as usize)),
            "folded" => Ok(Family::Folded(positive(params, "folded n")? as usize)),
            "complete" => Ok(Family::Complete(positive(params, "complete m")?)),
            "hamming" => {
                let (n, m) = params
                    .split_once([',', ':'])
                    .ok_or_else(|| Error::InvalidInput("hamming needs n,m".into()))?;
                Ok(Family::Hamming { n: positive(n, "hamming n")? as usize, m: positive(m, "hamming m")? })
            }
            "circulant" => {
                let (m, s) = params
                    .split_once([',', ':'])
                    .ok_or_else(|| Error::InvalidInput("circulant needs m,(s1;s2;…)".into()))?;
                let s = s.trim().trim_start_matches('(').trim_end_matches(')');
                let gens = s
                    .split(';')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        t.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::InvalidInput(format!("circulant generator {t:?} is not an integer")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Family::Circulant { m: positive(m, "circulant m")?, gens })
            }
            other => invalid(format!(
                "unknown family {other:?} (expected hypercube, halved, folded, hamming, complete or circulant)"
            )),
        }
    }

    pub fn group(&self) -> Result<AbelianGroup> {
        match self {
            Family::Hypercube(n) | Family::Halved(n) | Family::Folded(n) => AbelianGroup::power(2, *n),
            Family::Hamming { n, m } => AbelianGroup::power(*m, *n),
            Family::Complete(m) | Family::Circulant { m, .. } => AbelianGroup::new(&[*m]),
        }
    }

    pub fn generators(&self, g: &AbelianGroup) -> Result<Vec<GroupElement>> {
        let n = g.rank();
        let units = (0..n).map(|i| g.unit(i, 1));
        Ok(match self {
            Family::Hypercube(_) => units.collect(),
            Family::Halved(_) => {
                let mut s: Vec<GroupElement> = units.collect();
                for i in 0..n {
                    for j in i + 1..n {
                        s.push(g.add(&g.unit(i, 1), &g.unit(j, 1)));
                    }
                }
                s
            }
            Family::Folded(_) => {
                let mut s: Vec<GroupElement> = units.collect();
                s.push(GroupElement(vec![1; n]));
                s
            }
            Family::Hamming { m, .. } => {
                (0..n).flat_map(|i| (1..*m).map(move |a| (i, a))).map(|(i, a)| g.unit(i, a)).collect()
            }
            Family::Complete(m) => (1..*m).map(|a| GroupElement(vec![a])).collect(),
            Family::Circulant { gens, .. } => {
                gens.iter().map(|&s| g.element(&[s])).collect::<Result<_>>()?
            }
        })
    }

    pub fn build(&self) -> Result<CayleyGraph> {
        let g = self.group()?;
        crate::guard::check_group_order(g.size())?;
        let s = GeneratingSet::new(&g, self.generators(&g)?)?;
        CayleyGraph::new(g, s)
    }

    pub fn name(&self) -> String {
        match self {
            Family::Hypercube(n) => format!("hypercube:{n}"),
            Family::Halved(n) => format!("halved:{n}"),
            Family::Folded(n) => format!("folded:{n}"),
            Family::Hamming { n, m } => format!("hamming:{n},{m}"),
            Family::Complete(m) => format!("complete:{m}"),
            Family::Circulant { m, gens } => format!(
                "circulant:{m},({})",
                gens.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";")
            ),
        }
    }
}

/// Shorthand for `Family::parse(spec)?.build()`.
pub fn family(spec: &str) -> Result<CayleyGraph> {
    Family::parse(spec)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        assert_eq!(family("hypercube:3").unwrap().gens().len(), 3);
        assert_eq!(family("halved:4").unwrap().gens().len(), 10);
        assert_eq!(family("halved:3").unwrap().gens().len(), 6);
        assert_eq!(family("folded:4").unwrap().gens().len(), 5);
        let h = family("hamming:2:3").unwrap();
        assert_eq!((h.size(), h.gens().len()), (9, 4));
        assert_eq!(family("hamming:2,3").unwrap().gens().len(), 4);
        assert_eq!(family("complete:4").unwrap().gens().len(), 3);
        assert_eq!(family("circulant:6,(1;5)").unwrap().gens().len(), 2);
    }

    #[test]
    fn invalid_specs() {
        for bad in ["cube:3", "hypercube", "hypercube:0", "hamming:2", "complete:-1", "circulant:5,(0)", "folded:1"] {
            assert!(family(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn names_round_trip() {
        for s in ["hypercube:3", "halved:4", "folded:5", "hamming:2,3", "complete:4", "circulant:7,(1;6)"] {
            assert_eq!(Family::parse(s).unwrap().name(), s);
        }
    }
}
