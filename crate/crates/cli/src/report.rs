//! CSV and SVG artifact emission. Numbers are printed with Rust's
//! shortest round-trip float formatting, so identical inputs give
//! byte-identical files and the CSV parses back without loss.

use std::fs;
use std::path::{Path, PathBuf};

use neumann_core::phi::{CurvatureConstants, PhiProfile};
use neumann_core::verify::{CheckTag, InequalityReport};
use neumann_core::{CoreError, Result};

pub const REPORTS_CSV: &str = "reports.csv";
pub const PHI_CSV: &str = "phi.csv";

pub fn reports_csv_string(reports: &[InequalityReport]) -> String {
    let mut out = String::from("scenario_id,theorem,lhs,se,rhs,slack,pass\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.scenario_id,
            r.theorem.label(),
            r.lhs,
            r.se,
            r.rhs,
            r.slack,
            r.pass
        ));
    }
    out
}

pub fn write_reports_csv(reports: &[InequalityReport], out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(REPORTS_CSV);
    fs::write(&path, reports_csv_string(reports))?;
    Ok(path)
}

pub fn read_reports_csv(path: &Path) -> Result<Vec<InequalityReport>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != "scenario_id,theorem,lhs,se,rhs,slack,pass" {
        return Err(CoreError::Config(vec![format!(
            "{}: unexpected header '{header}'",
            path.display()
        )]));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CoreError::Config(vec![format!(
                "{}: line {}: expected 7 fields",
                path.display(),
                i + 2
            )]));
        }
        let theorem = CheckTag::from_label(fields[1]).ok_or_else(|| {
            CoreError::Config(vec![format!("unknown theorem tag '{}'", fields[1])])
        })?;
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| CoreError::Config(vec![format!("bad number '{s}'")]))
        };
        out.push(InequalityReport {
            scenario_id: fields[0].to_string(),
            theorem,
            lhs: num(fields[2])?,
            se: num(fields[3])?,
            rhs: num(fields[4])?,
            slack: num(fields[5])?,
            pass: fields[6] == "true",
            bias_budget: 0.0,
        });
    }
    Ok(out)
}

pub fn phi_csv_string(rows: &[(String, PhiProfile, CurvatureConstants)]) -> String {
    let mut out = String::from(
        "scenario_id,sigma,theta,k,r1,H_r1,tildeK,tildeK_p,legacy_K_p,phi_sup_bound\n",
    );
    for (id, profile, c) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            id,
            profile.sigma,
            profile.theta,
            profile.k,
            profile.r1,
            profile.h_r1,
            c.tilde_k,
            c.tilde_k_p,
            c.legacy_k_p,
            c.phi_sup_bound
        ));
    }
    out
}

pub fn write_phi_csv(
    rows: &[(String, PhiProfile, CurvatureConstants)],
    out_dir: &Path,
) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(PHI_CSV);
    fs::write(&path, phi_csv_string(rows))?;
    Ok(path)
}

/// One slack chart per theorem tag present in the reports.
pub fn write_slack_svgs(reports: &[InequalityReport], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for tag in CheckTag::ALL {
        let rows: Vec<&InequalityReport> =
            reports.iter().filter(|r| r.theorem == tag).collect();
        if rows.is_empty() {
            continue;
        }
        let path = out_dir.join(format!("slack_{}.svg", tag.label()));
        fs::write(&path, slack_svg(tag, &rows))?;
        written.push(path);
    }
    Ok(written)
}

fn slack_svg(tag: CheckTag, rows: &[&InequalityReport]) -> String {
    let (w, h) = (640.0, 360.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 80.0);
    let plot_w = w - ml - mr;
    let plot_h = h - mt - mb;
    let lo = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.slack).fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.1 * (hi - lo).max(1e-12);
    let (lo, hi) = (lo.min(0.0) - pad, hi.max(0.0) + pad);
    let sx = |i: usize| -> f64 {
        if rows.len() == 1 {
            ml + plot_w / 2.0
        } else {
            ml + plot_w * i as f64 / (rows.len() - 1) as f64
        }
    };
    let sy = |v: f64| mt + plot_h * (1.0 - (v - lo) / (hi - lo));
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"monospace\" font-size=\"11\">\n"
    );
    s.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-size=\"14\">slack by scenario: {}</text>\n",
        ml,
        tag.label()
    ));
    // zero line
    let y0 = sy(0.0);
    s.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"#999\" \
         stroke-dasharray=\"4 3\"/>\n",
        w - mr
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" fill=\"#999\">0</text>\n",
        w - mr - 12.0,
        y0 - 4.0
    ));
    // axis labels
    for (v, label) in [(lo, format!("{lo:.3e}")), (hi, format!("{hi:.3e}"))] {
        s.push_str(&format!(
            "<text x=\"4\" y=\"{}\">{}</text>\n",
            sy(v) + 4.0,
            label
        ));
    }
    if rows.len() > 1 {
        let pts: Vec<String> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{},{}", sx(i), sy(r.slack)))
            .collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#3366cc\"/>\n",
            pts.join(" ")
        ));
    }
    for (i, r) in rows.iter().enumerate() {
        let color = if r.pass { "#2a8a2a" } else { "#cc3333" };
        s.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{color}\"/>\n",
            sx(i),
            sy(r.slack)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" transform=\"rotate(45 {} {})\">{}</text>\n",
            sx(i),
            h - mb + 16.0,
            sx(i),
            h - mb + 16.0,
            r.scenario_id
        ));
    }
    s.push_str("</svg>\n");
    s
}
