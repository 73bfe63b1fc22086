use super::PhysicalReport;
use std::fmt::Write;

pub fn render_markdown(r: &PhysicalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Benchmarking report\n");
    let _ = writeln!(s, "Estimated many-body fidelity: **{:.6}**\n", r.fidelity);
    if let (Some(w), Some(e)) = (r.white_noise_weight, r.white_noise_expected) {
        let _ = writeln!(s, "White-noise weight {w:.6} (expected from fidelity alone: {e:.6})\n");
    }
    let _ = writeln!(s, "## Proportions\n\n| class | weight |\n|---|---|");
    for (k, v) in &r.proportions {
        let _ = writeln!(s, "| {k} | {v:.6} |");
    }
    let _ = writeln!(s, "\n## Physical rates\n\n| source | c | c corrected | rate |\n|---|---|---|---|");
    for e in &r.rates {
        let _ = writeln!(s, "| {} | {:.3e} | {:.3e} | {:.3e} |", e.label, e.c, e.c_corrected, e.gamma);
    }
    let p = &r.provenance;
    let seeds: Vec<String> = p.seeds.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(
        s,
        "\nEstimator `{}`, seeds [{}], config sha256 `{}`, version {}",
        p.estimator,
        seeds.join(", "),
        p.config_hash,
        p.tool_version
    );
    s
}
