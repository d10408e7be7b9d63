use crate::error::{invalid, Error, Result};
use crate::haar::DyadicNode;
use crate::torus::{QuarterArc, SquareKind};
use crate::Real;

/// A sequence of torus points `θ⃗^0, θ⃗^1, ...`, one point of `T^d` per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct SignTossPath<T> {
    d: usize,
    theta: Vec<Vec<T>>,
}

impl<T: Real> SignTossPath<T> {
    pub fn new(d: usize, theta: Vec<Vec<T>>) -> Result<Self> {
        if d == 0 {
            return invalid("d must be at least 1");
        }
        if let Some(bad) = theta.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        Ok(Self { d, theta })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn clusters(&self) -> usize {
        self.theta.len()
    }

    /// `θ_t = θ^l_m` for `t = l d + m`.
    pub fn variable(&self, t: usize) -> Option<T> {
        self.theta.get(t / self.d).map(|p| p[t % self.d])
    }

    pub fn arcs(&self) -> Vec<QuarterArc> {
        self.theta
            .iter()
            .flatten()
            .map(|&x| QuarterArc::containing(x))
            .collect()
    }

    /// The first `count` tosses, `true` for `+`, with exact sign evaluation.
    pub fn tosses(&self, count: usize) -> Result<Vec<bool>> {
        if count > self.d * self.theta.len() {
            return invalid(format!(
                "{count} tosses need {} clusters, only {} supplied",
                count.div_ceil(self.d),
                self.theta.len()
            ));
        }
        Ok(tosses_from_arcs(&self.arcs()[..count]))
    }
}

/// Tosses generated by the quarter arcs containing `θ_0, θ_1, ...`.
pub fn tosses_from_arcs(arcs: &[QuarterArc]) -> Vec<bool> {
    let mut out = Vec::with_capacity(arcs.len());
    let mut prev = true;
    for &arc in arcs {
        let toss = SquareKind::from_sign(prev).arc_value(arc) > 0;
        out.push(toss);
        prev = toss;
    }
    out
}

/// The dyadic node of the given depth selected by the path.
pub fn encode_path<T: Real>(path: &SignTossPath<T>, depth: u32) -> Result<DyadicNode> {
    let tosses = path.tosses(depth as usize)?;
    Ok(tosses
        .into_iter()
        .fold(DyadicNode::ROOT, |node, plus| node.child(plus)))
}
