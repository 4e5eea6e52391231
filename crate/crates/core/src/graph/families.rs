use super::{Edge, GraphError, MetricGraph};

/// Named graph families with deterministic ids.
///
/// | family        | vertices            | edges (tail, head)              |
/// |---------------|---------------------|---------------------------------|
/// | `Path(n)`     | `v0..v{n-1}`        | `e{i} = (v{i}, v{i+1})`         |
/// | `Star(p)`     | `c`, `v1..vp`       | `e{i} = (c, v{i})`              |
/// | `Dipole(m)`   | `v`, `w`            | `e{i} = (v, w)`, `i = 1..m`     |
/// | `Cycle(m)`    | `v0..v{m-1}`        | `e{i} = (v{i}, v{i+1 mod m})`   |
/// | `Flower(m)`   | `v`                 | `e{i} = (v, v)`, `i = 1..m`     |
/// | `Complete(n)` | `v0..v{n-1}`        | `v{i}v{j} = (v{i}, v{j})`, `i<j`|
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Path(usize),
    Star(usize),
    Dipole(usize),
    Cycle(usize),
    Flower(usize),
    Complete(usize),
}

impl Family {
    pub fn edge_count(&self) -> usize {
        match *self {
            Family::Path(n) => n.saturating_sub(1),
            Family::Star(m) | Family::Dipole(m) | Family::Cycle(m) | Family::Flower(m) => m,
            Family::Complete(n) => n * n.saturating_sub(1) / 2,
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        let ok = match *self {
            Family::Path(n) | Family::Complete(n) => n >= 2,
            Family::Star(m) | Family::Dipole(m) | Family::Cycle(m) | Family::Flower(m) => m >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(GraphError::InvalidFamily(format!("{self:?}")))
        }
    }
}

pub fn generate(family: Family, lengths: &[f64]) -> Result<MetricGraph, GraphError> {
    family.validate()?;
    let m = family.edge_count();
    if lengths.len() != m {
        return Err(GraphError::LengthCount { expected: m, got: lengths.len() });
    }
    let named = |prefix: &str, count: usize, offset: usize| -> Vec<String> {
        (offset..offset + count).map(|i| format!("{prefix}{i}")).collect()
    };
    let (vertices, ends): (Vec<String>, Vec<(String, usize, usize)>) = match family {
        Family::Path(n) => {
            (named("v", n, 0), (0..n - 1).map(|i| (format!("e{i}"), i, i + 1)).collect())
        }
        Family::Star(p) => {
            let mut v = vec!["c".to_string()];
            v.extend(named("v", p, 1));
            (v, (1..=p).map(|i| (format!("e{i}"), 0, i)).collect())
        }
        Family::Dipole(m) => {
            (vec!["v".into(), "w".into()], (1..=m).map(|i| (format!("e{i}"), 0, 1)).collect())
        }
        Family::Cycle(m) => {
            (named("v", m, 0), (0..m).map(|i| (format!("e{i}"), i, (i + 1) % m)).collect())
        }
        Family::Flower(m) => (vec!["v".into()], (1..=m).map(|i| (format!("e{i}"), 0, 0)).collect()),
        Family::Complete(n) => {
            let mut ends = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    ends.push((format!("v{i}v{j}"), i, j));
                }
            }
            (named("v", n, 0), ends)
        }
    };
    let edges = ends
        .into_iter()
        .zip(lengths)
        .map(|((id, tail, head), &length)| Edge { id, tail, head, length })
        .collect();
    MetricGraph::from_parts(vertices, edges, true)
}
