use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::ff::{Field, FieldSpec};
use crate::ghost::{splitmix64, StopReason};
use crate::group::{GroupData, GroupDescriptor};
use crate::par;
use crate::stable::StableCategory;

/// Parameters of a batch of random-module trials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub group: GroupDescriptor,
    pub field: FieldSpec,
    pub trials: usize,
    /// Number of cofibre steps; stages `R_0 ..= R_steps` are measured.
    pub steps: usize,
    pub summands: usize,
    pub range: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

impl ExperimentConfig {
    /// Seed for trial `i`; independent of how many trials run.
    pub fn trial_seed(&self, i: usize) -> u64 {
        self.seed ^ splitmix64(i as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub step: usize,
    pub dim: usize,
    pub core_dim: usize,
    pub gel: Option<usize>,
    pub stopped_by: StopReason,
}

/// Occurrences of each length at one step, plus trials that hit the cap.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthCounts {
    pub step: usize,
    pub lengths: BTreeMap<usize, usize>,
    pub capped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub table: Vec<LengthCounts>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let group = Arc::new(GroupData::from_descriptor(&config.group)?);
    let cat = StableCategory::new(&group, &Field::new(config.field.clone()))?;
    run_experiment_in(&cat, config)
}

/// Run the trials over an existing category, which must match the config.
pub fn run_experiment_in(cat: &StableCategory, config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let per_trial = par::map_range(config.trials, |i| -> Result<Vec<TrialRecord>, HarnessError> {
        let seed = config.trial_seed(i);
        let random = cat.create_random_module(config.steps, config.summands, config.range, seed)?;
        random
            .stages
            .iter()
            .enumerate()
            .map(|(step, r)| {
                let report = cat.generating_length(r, config.range, config.cap)?;
                Ok(TrialRecord {
                    trial: i,
                    seed,
                    step,
                    dim: r.dim(),
                    core_dim: report.core_dim,
                    gel: report.gel,
                    stopped_by: report.stopped_by,
                })
            })
            .collect()
    });
    let mut records = Vec::with_capacity(config.trials * (config.steps + 1));
    for trial in per_trial {
        records.extend(trial?);
    }
    let mut table: Vec<LengthCounts> = (0..=config.steps).map(|step| LengthCounts { step, ..Default::default() }).collect();
    for r in &records {
        let row = &mut table[r.step];
        match r.gel {
            Some(g) => *row.lengths.entry(g).or_default() += 1,
            None => row.capped += 1,
        }
    }
    Ok(ExperimentReport { config: config.clone(), records, table })
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Largest length observed at any step.
    pub fn max_length(&self) -> Option<usize> {
        self.records.iter().filter_map(|r| r.gel).max()
    }

    pub fn count(&self, step: usize, length: usize) -> usize {
        self.table.get(step).and_then(|row| row.lengths.get(&length).copied()).unwrap_or(0)
    }

    /// The aggregated table as `step,length,count` rows; capped trials appear
    /// with the length column `cap`.
    pub fn table_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["step", "length", "count"]).expect("in-memory csv");
        for row in &self.table {
            for (len, count) in &row.lengths {
                w.write_record([row.step.to_string(), len.to_string(), count.to_string()]).expect("in-memory csv");
            }
            if row.capped > 0 {
                w.write_record([row.step.to_string(), "cap".to_string(), row.capped.to_string()]).expect("in-memory csv");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
    }

    /// Per-trial records as CSV.
    pub fn records_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["trial", "seed", "step", "dim", "core_dim", "gel", "stopped_by"]).expect("in-memory csv");
        for r in &self.records {
            let stop = match r.stopped_by {
                StopReason::TrivialComposite => "trivial-composite",
                StopReason::Cap => "cap",
            };
            w.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                r.step.to_string(),
                r.dim.to_string(),
                r.core_dim.to_string(),
                r.gel.map_or(String::new(), |g| g.to_string()),
                stop.to_string(),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
    }

    /// Parse counts back out of [`ExperimentReport::table_csv`] output.
    pub fn parse_table_csv(text: &str) -> Result<Vec<LengthCounts>, HarnessError> {
        let mut rows: BTreeMap<usize, LengthCounts> = BTreeMap::new();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| HarnessError::Parse { context: format!("csv row {}: {e}", i + 2) })?;
            let field = |k: usize| -> Result<&str, HarnessError> {
                rec.get(k).ok_or_else(|| HarnessError::Parse { context: format!("csv row {}: missing column {k}", i + 2) })
            };
            let num = |s: &str| -> Result<usize, HarnessError> {
                s.parse().map_err(|_| HarnessError::Parse { context: format!("csv row {}: bad number {s:?}", i + 2) })
            };
            let step = num(field(0)?)?;
            let count = num(field(2)?)?;
            let row = rows.entry(step).or_insert_with(|| LengthCounts { step, ..Default::default() });
            match field(1)? {
                "cap" => row.capped += count,
                len => *row.lengths.entry(num(len)?).or_default() += count,
            }
        }
        Ok(rows.into_values().collect())
    }
}
