use crate::error::{Error, Result};
use crate::estimators::WhittleTemplate;
use crate::model::SarfimaSpec;
use crate::montecarlo::{
    run_mc_with, Bandwidth, EstimatorSpec, McConfig, McRun, RunOptions, REPLICATES_HEADER,
    SUMMARY_HEADER,
};

/// One row block of a design table: a true model and the estimators applied
/// to it.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignCell {
    /// `phi{lag}={value}`, e.g. `phi4=0.8`.
    pub label: String,
    pub config: McConfig,
}

pub fn design_names() -> &'static [&'static str] {
    &["table1", "table2", "table3", "table4", "table5"]
}

/// Built-in designs, `n = 1080`:
///
/// * `table1`: `d = 0.3` at period 4.
/// * `table2`: `d = (0.1, 0.3)` at periods `(1, 4)`.
/// * `table3`: `d = (0.1, 0.3)` at periods `(4, 12)`.
/// * `table4`, `table5`: the models of `table2` and `table3` with an AR
///   factor, fitted by Whittle without it.
///
/// Each cell adds one AR(1) factor `phi` at lag 1 or at a seasonal lag.
/// Estimators are `GPH_T` (capped full-gap bandwidth, pure models only),
/// `GPH_1` (`m = n^0.5`), `GPH_2` (`m = n^0.3`) and the Whittle fit `FT`,
/// which includes the AR factor when the model has one.
pub fn design(name: &str, reps: usize, master_seed: u64) -> Result<Vec<DesignCell>> {
    let n = 1080;
    let (base, ar_lags, misspecified): (SarfimaSpec<f64>, &[usize], bool) = match name {
        "table1" => (SarfimaSpec::new(&[(4, 0.3)], 1.0), &[1, 4], false),
        "table2" => (SarfimaSpec::new(&[(1, 0.1), (4, 0.3)], 1.0), &[1, 4], false),
        "table3" => (SarfimaSpec::new(&[(4, 0.1), (12, 0.3)], 1.0), &[1, 4, 12], false),
        "table4" => (SarfimaSpec::new(&[(1, 0.1), (4, 0.3)], 1.0), &[1, 4], true),
        "table5" => (SarfimaSpec::new(&[(4, 0.1), (12, 0.3)], 1.0), &[1, 4, 12], true),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown design {other:?}; expected one of {}",
                design_names().join(", ")
            )))
        }
    };
    let periods = base.periods();
    let mut cells = Vec::new();
    if !misspecified {
        cells.push(DesignCell {
            label: "phi1=0.0".into(),
            config: McConfig::new(
                base.clone(),
                vec![
                    EstimatorSpec::gph("GPH_T", Bandwidth::GphT),
                    EstimatorSpec::gph("GPH_1", Bandwidth::Power(0.5)),
                    EstimatorSpec::gph("GPH_2", Bandwidth::Power(0.3)),
                    EstimatorSpec::whittle("FT", WhittleTemplate::pure(&periods)),
                ],
                n,
                reps,
                master_seed,
            ),
        });
    }
    for &lag in ar_lags {
        for phi in [0.3, 0.8] {
            let spec = base.clone().with_ar(lag, vec![phi]);
            let estimators = if misspecified {
                vec![EstimatorSpec::whittle("FT", WhittleTemplate::pure(&periods))]
            } else {
                vec![
                    EstimatorSpec::gph("GPH_1", Bandwidth::Power(0.5)),
                    EstimatorSpec::gph("GPH_2", Bandwidth::Power(0.3)),
                    EstimatorSpec::whittle("FT", WhittleTemplate::pure(&periods).with_ar(lag, 1)),
                ]
            };
            cells.push(DesignCell {
                label: format!("phi{lag}={phi:.1}"),
                config: McConfig::new(spec, estimators, n, reps, master_seed),
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRun {
    pub label: String,
    pub run: McRun,
}

/// Runs every cell in order.
pub fn run_cells(cells: &[DesignCell], opts: RunOptions) -> Result<Vec<CellRun>> {
    cells
        .iter()
        .map(|c| {
            Ok(CellRun {
                label: c.label.clone(),
                run: run_mc_with(&c.config, opts)?,
            })
        })
        .collect()
}

/// Summary CSV of all cells; estimator names become `label/name`.
pub fn cells_csv(runs: &[CellRun]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    for r in runs {
        r.run.summary.write_rows(&mut out, &format!("{}/", r.label));
    }
    out
}

/// Per-replication CSV of all cells, estimator names as in [`cells_csv`].
pub fn cells_replicates_csv(runs: &[CellRun]) -> String {
    let mut out = String::from(REPLICATES_HEADER);
    for r in runs {
        r.run.write_replicates(&mut out, &format!("{}/", r.label));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_layout() {
        let t1 = design("table1", 10, 1).unwrap();
        let labels: Vec<&str> = t1.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["phi1=0.0", "phi1=0.3", "phi1=0.8", "phi4=0.3", "phi4=0.8"]);
        assert_eq!(t1[0].config.estimators.len(), 4);
        assert_eq!(design("table3", 10, 1).unwrap().len(), 7);
        let t4 = design("table4", 10, 1).unwrap();
        assert_eq!(t4.len(), 4);
        assert!(t4.iter().all(|c| c.config.estimators.len() == 1));
        assert!(design("table9", 10, 1).is_err());
    }
}
