//! Stable structured-text serialization of a solve report.
//!
//! One `key value` pair per line; floats are printed with 17 significant
//! digits so they round-trip double precision exactly. Identical inputs and
//! options produce byte-identical documents.

use sha2::{Digest, Sha256};

use cusped::solver::SolveReport;

pub fn render(rep: &SolveReport, input_text: &str) -> String {
    let digest = Sha256::digest(input_text.as_bytes());
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line("atri-report 1".into());
    line(format!("tool-version {}", env!("CARGO_PKG_VERSION")));
    line(format!("input-digest {digest:x}"));
    line(format!("status {}", rep.status.as_str()));
    line(format!("iterations {}", rep.iterations));
    line(format!("dimension {}", rep.dimension));
    line(format!("margin {:.16e}", rep.margin));
    line(format!("volume {:.16e}", rep.volume));
    line(format!("lower-bound {:.16e}", rep.lower_bound));
    if rep.edge_residual.is_finite() {
        line(format!("residual-edge {:.16e}", rep.edge_residual));
    }
    if rep.completeness_residual.is_finite() {
        line(format!(
            "residual-completeness {:.16e}",
            rep.completeness_residual
        ));
    }
    for &(cusp, p, q) in &rep.fillings {
        line(format!("filling {cusp} {p}/{q}"));
    }
    for (j, a) in rep.angles.iter().enumerate() {
        line(format!("angle {j} {a:.16e}"));
    }
    for (j, z) in rep.shapes.iter().enumerate() {
        line(format!("shape {j} {:.16e} {:.16e}", z.re, z.im));
    }
    out
}
