//! Plain-text instance files.
//!
//! ```text
//! # comment lines are ignored
//! n m k
//! u v      (m arc lines)
//! u v      (k mandatory arc lines, each among the arcs)
//! ```

use crate::error::FormatError;
use crate::graph::{Instance, Node};

fn numbers(line: &str, lineno: usize, count: usize) -> Result<Vec<usize>, FormatError> {
    let vals = line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| FormatError::Line {
                line: lineno,
                msg: format!("{t:?} is not a non-negative integer"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if vals.len() != count {
        return Err(FormatError::Line {
            line: lineno,
            msg: format!("expected {count} integers, found {}", vals.len()),
        });
    }
    Ok(vals)
}

pub fn read_instance(text: &str) -> Result<Instance, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| FormatError::Header("empty input".into()))?;
    let h = numbers(header, hl, 3).map_err(|e| FormatError::Header(e.to_string()))?;
    let (n, m, k) = (h[0], h[1], h[2]);
    if n == 0 {
        return Err(FormatError::Header("n must be at least 1".into()));
    }
    let mut pair = |what: &'static str, expected: usize, found: usize| {
        let (ln, l) = lines.next().ok_or(FormatError::Count {
            what,
            expected,
            found,
        })?;
        let v = numbers(l, ln, 2)?;
        Ok::<(Node, Node), FormatError>((v[0], v[1]))
    };
    let arcs = (0..m)
        .map(|i| pair("arc", m, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mand = (0..k)
        .map(|i| pair("mandatory", k, i))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some((ln, _)) = lines.next() {
        return Err(FormatError::Line {
            line: ln,
            msg: "trailing content after the declared arcs".into(),
        });
    }
    Ok(Instance::from_pairs(n, arcs, &mand)?)
}

pub fn write_instance(inst: &Instance) -> String {
    let dag = inst.dag();
    let mut out = format!("{} {} {}\n", inst.n(), dag.num_arcs(), inst.num_mandatory());
    for &(u, v) in dag.arcs() {
        out.push_str(&format!("{u} {v}\n"));
    }
    for a in inst.mandatory_arcs() {
        let (u, v) = dag.arcs()[a];
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// `(density %, sparsity %)`; sparsity is `None` without arcs.
pub fn stats(inst: &Instance) -> (f64, Option<f64>) {
    let n = inst.n() as f64;
    let m = inst.dag().num_arcs();
    let pairs = n * (n - 1.0) / 2.0;
    let density = if pairs > 0.0 {
        100.0 * m as f64 / pairs
    } else {
        0.0
    };
    let sparsity = (m > 0).then(|| 100.0 * inst.num_mandatory() as f64 / m as f64);
    (density, sparsity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GraphError;

    #[test]
    fn minimal_file() {
        let inst = read_instance("1 0 0\n").unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.dag().num_arcs(), 0);
    }

    #[test]
    fn chain_round_trip() {
        let text = "3 2 1\n1 2\n2 3\n1 2\n";
        assert_eq!(write_instance(&read_instance(text).unwrap()), text);
        let commented = "# chain\n3 2 1\n# arcs\n1 2\n2 3\n1 2\n";
        assert_eq!(write_instance(&read_instance(commented).unwrap()), text);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            read_instance("3 x 0"),
            Err(FormatError::Header(_))
        ));
        assert!(matches!(read_instance(""), Err(FormatError::Header(_))));
        assert_eq!(
            read_instance("2 1 0\n1 3\n"),
            Err(FormatError::Graph(GraphError::NodeOutOfRange(1, 3, 2)))
        );
        let e = read_instance("3 1 1\n1 2\n2 3\n").unwrap_err();
        assert!(e.to_string().contains("mandatory-not-in-A"));
        assert_eq!(
            read_instance("2 2 0\n1 2\n2 1\n"),
            Err(FormatError::Graph(GraphError::Cycle))
        );
        assert!(matches!(
            read_instance("3 2 0\n1 2\n"),
            Err(FormatError::Count { .. })
        ));
    }

    #[test]
    fn stats_examples() {
        let closure: Vec<_> = (1..=4)
            .flat_map(|i| (i + 1..=4).map(move |j| (i, j)))
            .collect();
        let all = closure.clone();
        let inst = Instance::from_pairs(4, closure, &all).unwrap();
        assert_eq!(stats(&inst), (100.0, Some(100.0)));
        assert_eq!(
            stats(&Instance::from_pairs(3, vec![], &[]).unwrap()).1,
            None
        );
    }
}
