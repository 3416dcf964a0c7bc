use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use nif::eeg_io::{synth_with_signatures, write_bundle, SynthConfig};

use crate::args::SynthArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

pub fn subject_dir_name(index: usize) -> String {
    format!("subject_{:02}", index + 1)
}

/// Seed of one subject's recording. Class signatures come from the run seed
/// and are shared by all subjects; layout and noise differ per subject.
fn subject_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64 + 1)
}

/// Writes one bundle per subject and returns their directories.
pub fn cmd_synth(args: &SynthArgs) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    if args.subjects == 0 {
        return Err(CliError::Usage("--subjects must be at least 1".into()));
    }
    let base = SynthConfig {
        num_classes: args.classes,
        events_per_class: args.events_per_class,
        sample_rate_hz: args.sample_rate,
        montage_size: args.channels,
        seed: args.seed,
        ..SynthConfig::default()
    };
    base.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let non_empty = match fs::read_dir(&args.out) {
        Ok(mut it) => it.next().is_some(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => false,
        Err(e) => return Err(CliError::io(&args.out, e)),
    };
    if non_empty && !args.force {
        return Err(CliError::Usage(format!(
            "{} is not empty; pass --force to write into it",
            args.out.display()
        )));
    }
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;

    let signatures = base.signatures();
    let mut dirs = Vec::with_capacity(args.subjects);
    let mut events = 0;
    for s in 0..args.subjects {
        let cfg = SynthConfig {
            seed: subject_seed(args.seed, s),
            ..base.clone()
        };
        let rec = synth_with_signatures(&cfg, &signatures)?;
        let dir = args.out.join(subject_dir_name(s));
        write_bundle(&rec, &dir)?;
        events += rec.events.len();
        dirs.push(dir);
    }

    let manifest_path = args.manifest.clone().unwrap_or_else(|| args.out.join("manifest.json"));
    RunManifest {
        command: "synth".into(),
        config: serde_json::to_value(args).expect("flags serialize"),
        seed: Some(args.seed),
        inputs: vec![],
        outputs: dirs.clone(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        workers: 1,
        epochs_generated: Some(events),
        epochs_skipped: None,
    }
    .write(&manifest_path)?;
    Ok(dirs)
}
