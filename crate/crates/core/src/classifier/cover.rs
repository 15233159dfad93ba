use crate::error::{Error, Result};
use crate::matrix::{Class, LabeledDataset};

/// Greedy epsilon-net over one class.
///
/// Members are scanned in ascending index order; a member not yet covered
/// becomes a prototype and covers every same-class member `j` with
/// `min(D(p, j), D(j, p)) < eps`. The result is sorted and covers the class,
/// but it is not guaranteed to be minimal.
pub fn greedy_cover(d: &LabeledDataset, class: Class, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0) {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps,
        });
    }
    let members = d.members(class);
    let m = d.matrix();
    let mut covered = vec![false; members.len()];
    let mut prototypes = Vec::new();
    for (t, &p) in members.iter().enumerate() {
        if covered[t] {
            continue;
        }
        prototypes.push(p);
        covered[t] = true;
        for (u, &q) in members.iter().enumerate().skip(t + 1) {
            if !covered[u] && m.sym_min(p, q) < eps {
                covered[u] = true;
            }
        }
    }
    Ok(prototypes)
}

pub fn greedy_cover_for(d: &LabeledDataset, token: &str, eps: f64) -> Result<Vec<usize>> {
    greedy_cover(d, d.class_for(token)?, eps)
}

/// True when every member of `class` is a prototype or lies strictly within
/// `eps` (symmetrized-min) of a same-class prototype.
pub fn is_covered(d: &LabeledDataset, class: Class, prototypes: &[usize], eps: f64) -> bool {
    let m = d.matrix();
    d.members(class).into_iter().all(|i| {
        prototypes
            .iter()
            .any(|&p| p == i || (d.class_of(p) == class && m.sym_min(i, p) < eps))
    })
}
