//! Deficiency summaries and CSV output.

use std::io::{self, Write};

use serde::Serialize;

use super::exact::Trajectory;
use super::scan::ScanResult;

/// One row per strategy and one for the mixture of each trajectory.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SummaryRow {
    pub trajectory: usize,
    /// `None` for the mixture row.
    pub strategy: Option<usize>,
    pub label: String,
    pub max_log2: f64,
    pub argmax_step: usize,
    pub final_log2: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DeficiencyReport {
    pub rows: Vec<SummaryRow>,
}

impl DeficiencyReport {
    /// Largest mixture deficiency over all trajectories, 0 when empty.
    pub fn max_deficiency_bits(&self) -> f64 {
        self.rows.iter().filter(|r| r.strategy.is_none()).map(|r| r.max_log2).fold(0.0, f64::max)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "trajectory,strategy,label,max_log2,argmax_step,final_log2")?;
        for r in &self.rows {
            let id = r.strategy.map(|i| i.to_string()).unwrap_or_else(|| "mixture".into());
            writeln!(w, "{},{},\"{}\",{},{},{}", r.trajectory, id, r.label.replace('"', "'"), r.max_log2, r.argmax_step, r.final_log2)?;
        }
        Ok(())
    }
}

fn first_max(path: &[crate::rational::Rational]) -> (usize, f64) {
    let mut best = 0;
    for (n, v) in path.iter().enumerate() {
        if v > &path[best] {
            best = n;
        }
    }
    (best, path[best].log2())
}

/// Per-strategy and mixture deficiencies of exact trajectories.
pub fn deficiency_summary(trajectories: &[Trajectory]) -> DeficiencyReport {
    let mut rows = Vec::new();
    for (t, traj) in trajectories.iter().enumerate() {
        for (i, path) in traj.capitals.iter().enumerate() {
            let (argmax_step, max_log2) = first_max(path);
            rows.push(SummaryRow {
                trajectory: t,
                strategy: Some(i),
                label: traj.labels[i].clone(),
                max_log2,
                argmax_step,
                final_log2: path.last().expect("initial step").log2(),
            });
        }
        rows.push(SummaryRow {
            trajectory: t,
            strategy: None,
            label: "mixture".into(),
            max_log2: traj.deficiency_bits,
            argmax_step: traj.mixture_argmax(),
            final_log2: traj.mixture.last().expect("initial step").log2(),
        });
    }
    DeficiencyReport { rows }
}

/// The same summary from floating-point scans.
pub fn scan_summary(scans: &[ScanResult]) -> DeficiencyReport {
    let mut rows = Vec::new();
    for (t, s) in scans.iter().enumerate() {
        for st in &s.strategies {
            rows.push(SummaryRow {
                trajectory: t,
                strategy: Some(st.id),
                label: st.label.clone(),
                max_log2: st.max_log2,
                argmax_step: st.argmax_step,
                final_log2: st.final_log2,
            });
        }
        rows.push(SummaryRow {
            trajectory: t,
            strategy: None,
            label: "mixture".into(),
            max_log2: s.deficiency_bits,
            argmax_step: s.mixture_argmax_step,
            final_log2: s.final_mixture_log2,
        });
    }
    DeficiencyReport { rows }
}

/// `n,symbol,strategy_id,capital_num,capital_den,mixture_log2`, one row per
/// step and strategy. Step 0 has an empty symbol.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut w: W) -> io::Result<()> {
    writeln!(w, "n,symbol,strategy_id,capital_num,capital_den,mixture_log2")?;
    for n in 0..=traj.len() {
        let symbol = if n == 0 { "" } else { traj.space.symbol(traj.symbols[n - 1]) };
        let mix = traj.mixture[n].log2();
        for (i, path) in traj.capitals.iter().enumerate() {
            let c = &path[n];
            writeln!(w, "{n},{symbol},{i},{},{},{mix}", c.numer(), c.denom())?;
        }
    }
    Ok(())
}
