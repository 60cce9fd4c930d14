use std::io::Write;

use super::StandardLp;

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.17e}")
    }
}

/// Writes a human-readable dump of the LP for external cross-checking:
///
/// ```text
/// rows <m> cols <n>
/// min <c_0> <c_1> ...
/// row <i>: <a_i0> <a_i1> ... = <b_i>
/// bound <j>: <lower> <upper>
/// ```
pub fn write_lp_text<W: Write>(mut w: W, lp: &StandardLp) -> std::io::Result<()> {
    writeln!(w, "rows {} cols {}", lp.num_rows(), lp.num_vars())?;
    write!(w, "min")?;
    for c in &lp.objective {
        write!(w, " {c:.17e}")?;
    }
    writeln!(w)?;
    for i in 0..lp.num_rows() {
        write!(w, "row {i}:")?;
        for a in lp.a_eq.row(i) {
            write!(w, " {a:.17e}")?;
        }
        writeln!(w, " = {:.17e}", lp.b_eq[i])?;
    }
    for j in 0..lp.num_vars() {
        writeln!(w, "bound {j}: {} {}", fmt_bound(lp.lower[j]), fmt_bound(lp.upper[j]))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn dump_layout() {
        let lp = StandardLp::new(
            vec![1.0, 0.0],
            DenseMatrix::from_rows(&[vec![1.0, -1.0]]).unwrap(),
            vec![2.0],
            vec![0.0, f64::NEG_INFINITY],
            vec![f64::INFINITY, 3.0],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_lp_text(&mut buf, &lp).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "rows 1 cols 2");
        assert!(lines[2].starts_with("row 0:") && lines[2].contains(" = "));
        assert!(lines[3].ends_with(" inf"));
        assert!(lines[4].starts_with("bound 1: -inf "));
    }
}
