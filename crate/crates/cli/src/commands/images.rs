use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use nif::eeg_io::{extract_epochs, read_bundle};
use nif::spectral::{epoch_band_powers, BandDefinition};
use nif::topomap::{export_png, export_tensor, project_montage, write_lbl1, RenderPlan, TopoImage};
use nif::{Error, Real};

use crate::args::{resolve_workers, ImagesArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{default_manifest_path, RunManifest};

#[derive(Debug, Clone, PartialEq)]
pub struct ImagesSummary {
    pub images: usize,
    pub skipped: usize,
    pub workers: usize,
}

struct Rendered {
    image: TopoImage<Real>,
    bundle: usize,
    event_index: usize,
}

fn bundle_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bundle".into())
}

/// Renders one image per interior event of every bundle. Output order is
/// bundle order, then event order, whatever the worker count.
pub fn cmd_images(args: &ImagesArgs) -> CliResult<ImagesSummary> {
    let start = Instant::now();
    let workers = resolve_workers(args.workers).map_err(CliError::Usage)?;
    if args.size < 2 {
        return Err(CliError::Usage("--size must be at least 2".into()));
    }
    if !(args.epoch_seconds.is_finite() && args.epoch_seconds > 0.0) {
        return Err(CliError::Usage("--epoch-seconds must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let bands = BandDefinition::default();

    let mut rendered: Vec<Rendered> = Vec::new();
    let mut skipped = 0;
    for (b, dir) in args.bundles.iter().enumerate() {
        let rec = read_bundle(dir)?;
        if rec.sample_rate_hz < 2.0 * bands.max_hz() {
            return Err(Error::SampleRateTooLow {
                fs: rec.sample_rate_hz,
                max_hz: bands.max_hz(),
            }
            .into());
        }
        let plan = RenderPlan::new(project_montage::<Real>(&rec.electrodes)?, args.size);
        let set = extract_epochs::<Real>(&rec, args.epoch_seconds);
        skipped += set.skipped;
        let images = pool.install(|| {
            set.epochs
                .par_iter()
                .map(|ep| {
                    let frame = epoch_band_powers(ep, &bands)?;
                    Ok(Rendered {
                        image: plan.render(&frame)?,
                        bundle: b,
                        event_index: ep.event_index,
                    })
                })
                .collect::<nif::Result<Vec<_>>>()
        })?;
        rendered.extend(images);
    }
    if rendered.is_empty() {
        return Err(Error::EmptyDataset.into());
    }

    let images: Vec<TopoImage<Real>> = rendered.iter().map(|r| r.image.clone()).collect();
    export_tensor(&images, &args.out, &args.labels)?;
    let mut outputs = vec![args.out.clone(), args.labels.clone()];
    if let Some(path) = &args.groups {
        let groups: Vec<u32> = rendered.iter().map(|r| r.bundle as u32).collect();
        write_lbl1(path, &groups)?;
        outputs.push(path.clone());
    }
    if let Some(dir) = &args.png_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let names: Vec<String> = args.bundles.iter().map(|p| bundle_name(p)).collect();
        pool.install(|| {
            rendered.par_iter().try_for_each(|r| {
                let path = dir.join(format!("{}_{}.png", names[r.bundle], r.event_index));
                export_png(&r.image, path)
            })
        })?;
        outputs.push(dir.clone());
    }

    let manifest_path = args.manifest.clone().unwrap_or_else(|| default_manifest_path(&args.out));
    RunManifest {
        command: "images".into(),
        config: serde_json::json!({
            "bundles": args.bundles,
            "epoch_seconds": args.epoch_seconds,
            "size": args.size,
            "workers": workers,
            "bands": bands.bands().iter().map(|b| (b.name, b.lo, b.hi)).collect::<Vec<_>>(),
        }),
        seed: None,
        inputs: args.bundles.clone(),
        outputs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        workers,
        epochs_generated: Some(rendered.len()),
        epochs_skipped: Some(skipped),
    }
    .write(&manifest_path)?;
    Ok(ImagesSummary {
        images: rendered.len(),
        skipped,
        workers,
    })
}
