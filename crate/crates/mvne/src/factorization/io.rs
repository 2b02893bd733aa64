//! Embedding text format: a `n d` header, then `identifier v1 ... vd` per
//! node in registry order, values with 17 significant digits.

use std::io::{BufRead, Write};

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::graph::{format_float, NodeRegistry};
use crate::scalar::Scalar;

pub fn write_embedding<T: Scalar, W: Write>(
    x: ArrayView2<'_, T>,
    registry: &NodeRegistry,
    mut out: W,
) -> Result<()> {
    let (n, d) = x.dim();
    if registry.len() != n {
        return Err(Error::Dimension(format!(
            "embedding has {n} rows, registry {} nodes",
            registry.len()
        )));
    }
    writeln!(out, "{n} {d}")?;
    let mut line = String::new();
    for (i, row) in x.rows().into_iter().enumerate() {
        line.clear();
        line.push_str(registry.name(i));
        for &v in row {
            line.push(' ');
            line.push_str(&format_float(v));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_embedding<T: Scalar, R: BufRead>(source: R) -> Result<(NodeRegistry, Array2<T>)> {
    let mut lines = source.lines().enumerate();
    let (n, d) = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::parse(1, "missing `n d` header"));
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [n, d] => n.parse::<usize>().ok().zip(d.parse::<usize>().ok()),
            _ => None,
        };
        break parsed.ok_or_else(|| Error::parse(idx + 1, "header must be `n d`"))?;
    };
    let mut registry = NodeRegistry::new();
    let mut data = Vec::with_capacity(n * d);
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let id = fields.next().expect("non-empty line has a field");
        if registry.get(id).is_some() {
            return Err(Error::parse(idx + 1, format!("duplicate node {id:?}")));
        }
        registry.intern(id);
        let before = data.len();
        for raw in fields {
            let v: f64 = raw
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("{raw:?} is not a number")))?;
            data.push(T::of(v));
        }
        if data.len() - before != d {
            return Err(Error::parse(
                idx + 1,
                format!("expected {d} values, found {}", data.len() - before),
            ));
        }
    }
    if registry.len() != n {
        return Err(Error::validation(format!(
            "header announces {n} nodes, file has {}",
            registry.len()
        )));
    }
    let x = Array2::from_shape_vec((n, d), data).map_err(|e| Error::Dimension(e.to_string()))?;
    Ok((registry, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn round_trip_is_exact() {
        let x = array![[0.1, 1.0 / 3.0], [1e-300, 0.9999999999999999]];
        let reg = NodeRegistry::from_ids(["p", "q"]);
        let mut buf = Vec::new();
        write_embedding(x.view(), &reg, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("2 2\np "));
        let (reg2, y) = read_embedding::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(reg, reg2);
        assert_eq!(x, y);
    }

    #[test]
    fn rejects_inconsistent_files() {
        assert!(read_embedding::<f64, _>("2 1\na 0.5\n".as_bytes()).is_err());
        assert!(read_embedding::<f64, _>("1 2\na 0.5\n".as_bytes()).is_err());
        assert!(read_embedding::<f64, _>("2 1\na 0.5\na 0.5\n".as_bytes()).is_err());
        assert!(read_embedding::<f64, _>("x\n".as_bytes()).is_err());
    }
}
