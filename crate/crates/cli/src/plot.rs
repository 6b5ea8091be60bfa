//! gnuplot script generation from a report.

use std::fmt::Write as _;
use std::path::Path;

use crate::report::ParsedReport;

/// Line style of the plotted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum PlotStyle {
    /// Plain lines.
    #[default]
    Lines,
    /// Lines with point markers.
    Linespoints,
}

/// Why a script could not be produced.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlotError {
    /// The report kind has nothing to plot.
    #[error("reports of kind `{0}` have no plottable series")]
    NotPlottable(String),
    /// A required column is absent.
    #[error("report has no column `{missing}`; columns present: {present:?}")]
    MissingColumn {
        /// Name or prefix that was looked for.
        missing: String,
        /// Columns found in the report.
        present: Vec<String>,
    },
}

struct Layout {
    x: &'static str,
    series_prefix: &'static str,
    extra: &'static [&'static str],
    xlabel: &'static str,
    ylabel: &'static str,
    log_y: bool,
}

fn layout(kind: &str) -> Option<Layout> {
    Some(match kind {
        "sweep_tau" => Layout {
            x: "tau [1]",
            series_prefix: "analytic_sop_na",
            extra: &[],
            xlabel: "tau",
            ylabel: "secrecy outage probability",
            log_y: false,
        },
        "uncertainty" => Layout {
            x: "tau [1]",
            series_prefix: "avg_sop_cst",
            extra: &["perfect_location_sop [prob]"],
            xlabel: "tau",
            ylabel: "average secrecy outage probability",
            log_y: false,
        },
        "sweep_snr" => Layout {
            x: "mean_snr_bob [dB]",
            series_prefix: "min_sop_na",
            extra: &[],
            xlabel: "mean SNR at Bob [dB]",
            ylabel: "minimum secrecy outage probability",
            log_y: true,
        },
        "optimize" => Layout {
            x: "n_alice [1]",
            series_prefix: "min_sop [",
            extra: &[],
            xlabel: "antennas at Alice",
            ylabel: "minimum secrecy outage probability",
            log_y: true,
        },
        _ => return None,
    })
}

fn title(column: &str) -> String {
    let name = column.split(" [").next().unwrap_or(column);
    if let Some(n) = name
        .strip_prefix("analytic_sop_na")
        .or_else(|| name.strip_prefix("min_sop_na"))
    {
        format!("N_A = {n}")
    } else if let Some(s) = name.strip_prefix("avg_sop_cst") {
        format!("c sigma_t = {} m", s.trim_end_matches('m'))
    } else {
        name.replace('_', " ")
    }
}

/// Builds a gnuplot script for `report`. `csv_ref` is how the script refers
/// to the CSV (normally a path relative to the script) and `output` the image
/// file it renders.
pub fn emit_plot_script(
    report: &ParsedReport,
    csv_ref: &str,
    output: &str,
    style: PlotStyle,
) -> Result<String, PlotError> {
    let l = layout(&report.kind).ok_or_else(|| PlotError::NotPlottable(report.kind.clone()))?;
    let missing = |m: &str| PlotError::MissingColumn {
        missing: m.to_string(),
        present: report.columns.clone(),
    };
    let x = report.column(l.x).ok_or_else(|| missing(l.x))?;
    let mut ys: Vec<usize> = report
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.starts_with(l.series_prefix) && !c.contains("_se_"))
        .map(|(i, _)| i)
        .collect();
    if ys.is_empty() {
        return Err(missing(&format!("{}*", l.series_prefix)));
    }
    for e in l.extra {
        ys.push(report.column(e).ok_or_else(|| missing(e))?);
    }
    let with = match style {
        PlotStyle::Lines => "lines",
        PlotStyle::Linespoints => "linespoints",
    };
    let quote = |s: &str| s.replace('\'', "''");
    let mut s = String::new();
    let _ = writeln!(s, "# {} report rendered from {}", report.kind, csv_ref);
    s.push_str(
        "set datafile separator ','\nset datafile commentschars '#'\nset datafile missing ''\n",
    );
    let _ = writeln!(
        s,
        "set terminal svg size 800,560 dynamic\nset output '{}'",
        quote(output)
    );
    let _ = writeln!(s, "set xlabel '{}'\nset ylabel '{}'", l.xlabel, l.ylabel);
    if l.log_y {
        s.push_str("set logscale y\n");
    }
    s.push_str("set grid\nset key top right\n");
    let series: Vec<String> = ys
        .iter()
        .enumerate()
        .map(|(k, &y)| {
            let file = if k == 0 {
                format!("'{}'", quote(csv_ref))
            } else {
                "''".into()
            };
            format!(
                "{file} using {}:{} skip 1 with {with} title '{}'",
                x + 1,
                y + 1,
                quote(&title(&report.columns[y]))
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    Ok(s)
}

/// Path of `csv` as seen from the directory holding `script`.
pub fn relative_reference(csv: &Path, script: &Path) -> String {
    let abs = |p: &Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    let csv_abs = abs(csv);
    let dir = abs(script)
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    pathdiff::diff_paths(&csv_abs, &dir)
        .unwrap_or(csv_abs)
        .to_string_lossy()
        .into_owned()
}
