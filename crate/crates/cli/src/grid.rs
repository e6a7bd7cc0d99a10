//! Grid specifications: `axis=values` clauses separated by `;`, where values are either a
//! comma-separated list of rationals or an inclusive range `lo:hi:count`.

use std::collections::BTreeMap;

use rug::Rational;
use tycho_core::{parse_rational, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: BTreeMap<String, Vec<Rational>>,
}

fn parse_axis(spec: &str) -> Result<Vec<Rational>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, count] => {
            let lo = parse_rational(lo)?;
            let hi = parse_rational(hi)?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter {
                    field: "grid",
                    reason: format!("`{count}` is not a point count"),
                })?;
            if count == 0 {
                return Err(Error::InvalidParameter {
                    field: "grid",
                    reason: "point count must be positive".into(),
                });
            }
            if count == 1 {
                return Ok(vec![lo]);
            }
            let step = Rational::from(&hi - &lo) / (count as u32 - 1);
            Ok((0..count as u32).map(|i| Rational::from(&step * i) + &lo).collect())
        }
        [list] => list.split(',').map(parse_rational).collect(),
        _ => Err(Error::InvalidParameter {
            field: "grid",
            reason: format!("`{spec}` is neither a list nor lo:hi:count"),
        }),
    }
}

impl Grid {
    pub fn parse(spec: &str) -> Result<Grid> {
        let mut axes = BTreeMap::new();
        for clause in spec.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (name, values) = clause.split_once('=').ok_or_else(|| Error::InvalidParameter {
                field: "grid",
                reason: format!("clause `{clause}` lacks `=`"),
            })?;
            let name = name.trim();
            if !["x", "x1", "x2", "t"].contains(&name) {
                return Err(Error::InvalidParameter {
                    field: "grid",
                    reason: format!("unknown axis `{name}` (expected x, x1, x2 or t)"),
                });
            }
            axes.insert(name.to_string(), parse_axis(values)?);
        }
        Ok(Grid { axes })
    }

    /// Points as (space coordinates, t), space-major with time varying slowest.
    pub fn points(&self, planar: bool) -> Result<Vec<(Vec<Rational>, Rational)>> {
        let axis = |name: &str| -> Result<&Vec<Rational>> {
            self.axes.get(name).ok_or_else(|| Error::InvalidParameter {
                field: "grid",
                reason: format!("missing axis `{name}`"),
            })
        };
        let ts = axis("t")?;
        let mut out = Vec::new();
        for t in ts {
            if planar {
                for x1 in axis("x1")? {
                    for x2 in axis("x2")? {
                        out.push((vec![x1.clone(), x2.clone()], t.clone()));
                    }
                }
            } else {
                for x in axis("x")? {
                    out.push((vec![x.clone()], t.clone()));
                }
            }
        }
        Ok(out)
    }
}
