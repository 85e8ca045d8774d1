use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;
use rssloc_core::artifact;
use rssloc_core::data::{denormalize_rssi, split_by_device, write_canonical_csv};
use rssloc_core::evaluation::{
    ablation_sae, cross_device_matrix, emit_report, latency_benchmark, run_dir_name, Report, ReportFormat,
};
use rssloc_core::localization::{predict_location, train_model};
use rssloc_core::{FingerprintDatabase, LocalizationModel, Scan};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{device_list, ConfigArg, DataArgs, FileConfig, GbtArgs, OutDirArg, SaeArgs, SplitArgs};
use crate::CliError;

type Result<T = ()> = std::result::Result<T, CliError>;

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Core(rssloc_core::Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

fn required_path(flag: &Option<PathBuf>, file: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.clone()
        .or_else(|| file.clone())
        .ok_or_else(|| CliError::Usage(format!("--{name} is required (or `{name}` in the config file)")))
}

/// Creates `<out>/run-<unix time>-<config hash>` and returns it.
fn make_run_dir(out: &Path, provenance: &Value) -> Result<PathBuf> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let hash = sha256_hex(provenance.to_string().as_bytes());
    let dir = out.join(run_dir_name(secs, &hash));
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}

fn restrict_devices(db: FingerprintDatabase, devices: &[String]) -> Result<FingerprintDatabase> {
    if devices.is_empty() {
        return Ok(db);
    }
    let (subset, _) = split_by_device(&db, devices, devices)?;
    Ok(subset)
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    data: DataArgs,
    /// Canonical CSV file to write (required here or as `out` in the config)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn ingest(a: IngestArgs) -> Result {
    let file = FileConfig::load(a.config.config.as_deref())?;
    let source = a.data.resolve(&file)?;
    let out = required_path(&a.out, &file.out, "out")?;
    let db = source.load()?;
    let mut buf = Vec::new();
    write_canonical_csv(&db, &mut buf)?;
    fs::write(&out, &buf).map_err(|e| io_err(&out, e))?;
    println!(
        "{} records, {} access points, {} devices, {} reference points, {} clamped readings -> {}",
        db.len(),
        db.dim(),
        db.devices().len(),
        db.rp_labels().len(),
        db.clamped_readings(),
        out.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    data: DataArgs,
    /// Train only on these comma-separated devices [default: all]
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    devices: Vec<String>,
    #[command(flatten)]
    sae: SaeArgs,
    #[command(flatten)]
    gbt: GbtArgs,
    /// Model artifact to write (required here or as `out` in the config)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn train(a: TrainArgs) -> Result {
    let file = FileConfig::load(a.config.config.as_deref())?;
    let source = a.data.resolve(&file)?;
    let sae = a.sae.resolve(&file)?;
    let gbt = a.gbt.resolve(&file)?;
    let out = required_path(&a.out, &file.out, "out")?;
    let devices = device_list(&a.devices, file.devices.as_ref());
    let db = restrict_devices(source.load()?, &devices)?;
    let model = train_model(&db, sae.as_ref(), &gbt)?;
    let bytes = artifact::encode(&model)?;
    fs::write(&out, &bytes).map_err(|e| io_err(&out, e))?;
    println!(
        "trained on {} rows ({} reference points) -> {} sha256 {}",
        model.metadata.training_rows,
        model.rp_coordinates.len(),
        out.display(),
        sha256_hex(&bytes)
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Model artifact written by `train` (required here or as `model` in the config)
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Scan file: JSON object, `ap_id,dbm` rows, or one header row of ids over one row of dBm (required here or as `scan` in the config)
    #[arg(long, value_name = "FILE")]
    scan: Option<PathBuf>,
}

pub fn predict(a: PredictArgs) -> Result {
    let file = FileConfig::load(a.config.config.as_deref())?;
    let model_path = required_path(&a.model, &file.model, "model")?;
    let scan_path = required_path(&a.scan, &file.scan, "scan")?;
    let model: LocalizationModel = artifact::load(&model_path)?;
    let scan = Scan::load(&scan_path)?;
    let p = predict_location(&model, &scan)?;
    if p.low_confidence {
        eprintln!("warning: no reading in the scan matches a known access point");
    }
    println!("{},{},{},{}", p.location.x, p.location.y, p.location.z, p.rp_label);
    Ok(())
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated devices forming the matrix rows and columns [default: all in the data]
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    devices: Vec<String>,
    #[command(flatten)]
    sae: SaeArgs,
    #[command(flatten)]
    gbt: GbtArgs,
    #[command(flatten)]
    split: SplitArgs,
    #[command(flatten)]
    out: OutDirArg,
}

pub fn evaluate(a: EvaluateArgs) -> Result {
    let file = FileConfig::load(a.config.config.as_deref())?;
    let source = a.data.resolve(&file)?;
    let sae = a.sae.resolve(&file)?;
    let gbt = a.gbt.resolve(&file)?;
    let split = a.split.resolve(&file);
    let out = a.out.resolve(&file);
    let db = source.load()?;
    let mut devices = device_list(&a.devices, file.devices.as_ref());
    if devices.is_empty() {
        devices = db.devices();
    }
    let matrix = cross_device_matrix(&db, &devices, sae.as_ref(), &gbt, split)?;
    let summary = matrix.summary()?;

    let provenance = json!({
        "command": "evaluate",
        "data": source,
        "dataset_hash": db.content_hash(),
        "devices": devices,
        "sae": sae,
        "gbt": gbt,
        "split": split,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let dir = make_run_dir(&out, &provenance)?;
    let matrix = Report {
        provenance: provenance.clone(),
        result: matrix,
    };
    emit_report(&matrix, dir.join("matrix.csv"), ReportFormat::Csv)?;
    emit_report(&matrix, dir.join("matrix.json"), ReportFormat::Json)?;
    emit_report(
        &Report {
            provenance,
            result: summary.clone(),
        },
        dir.join("stats.json"),
        ReportFormat::Json,
    )?;
    println!(
        "mean error {:.3} m (cells {:.3}..{:.3} m) -> {}",
        summary.pooled.mean,
        summary.over_cells.min,
        summary.over_cells.max,
        dir.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated devices to train on (required)
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    train_devices: Vec<String>,
    /// Comma-separated devices to test on (required)
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    test_devices: Vec<String>,
    #[command(flatten)]
    sae: SaeArgs,
    #[command(flatten)]
    gbt: GbtArgs,
    #[command(flatten)]
    out: OutDirArg,
}

pub fn ablate(a: AblateArgs) -> Result {
    let file = FileConfig::load(a.config.config.as_deref())?;
    let source = a.data.resolve(&file)?;
    if a.sae.no_sae {
        return Err(CliError::Usage("--no-sae makes no sense for an ablation".into()));
    }
    let sae = a.sae.resolve_config(&file)?;
    let gbt = a.gbt.resolve(&file)?;
    let out = a.out.resolve(&file);
    let train_devices = device_list(&a.train_devices, file.train_devices.as_ref());
    let test_devices = device_list(&a.test_devices, file.test_devices.as_ref());
    if train_devices.is_empty() || test_devices.is_empty() {
        return Err(CliError::Usage("--train-devices and --test-devices are required".into()));
    }
    let db = source.load()?;
    let (train, test) = split_by_device(&db, &train_devices, &test_devices)?;
    let result = ablation_sae(&train, &test, &sae, &gbt)?;

    let provenance = json!({
        "command": "ablate",
        "data": source,
        "dataset_hash": db.content_hash(),
        "train_devices": train_devices,
        "test_devices": test_devices,
        "sae": sae,
        "gbt": gbt,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let dir = make_run_dir(&out, &provenance)?;
    let report = Report { provenance, result };
    emit_report(&report, dir.join("ablation.json"), ReportFormat::Json)?;
    emit_report(&report, dir.join("ablation.csv"), ReportFormat::Csv)?;
    let r = &report.result;
    println!(
        "mean error with augmentation {:.3} m, without {:.3} m -> {}",
        r.with_sae.mean,
        r.without_sae.mean,
        dir.display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Model artifact written by `train` (required here or as `model` in the config)
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Scan file to time; repeat for several [default: records of --data]
    #[arg(long, value_name = "FILE")]
    scan: Vec<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    /// Records of --data used as queries [default: 100]
    #[arg(long, value_name = "N")]
    queries: Option<usize>,
    /// Timed passes over the queries [default: 10]
    #[arg(long, value_name = "N")]
    repetitions: Option<usize>,
    #[command(flatten)]
    out: OutDirArg,
}

pub fn bench(a: BenchArgs) -> Result {
    let file = FileConfig::load(a.config.config.as_deref())?;
    let model_path = required_path(&a.model, &file.model, "model")?;
    let repetitions = a.repetitions.or(file.repetitions).unwrap_or(10);
    let out = a.out.resolve(&file);
    let model: LocalizationModel = artifact::load(&model_path)?;

    let mut scan_paths = a.scan.clone();
    if scan_paths.is_empty() {
        scan_paths.extend(file.scan.clone());
    }
    let (queries, query_source) = if scan_paths.is_empty() {
        let source = a.data.resolve(&file).map_err(|_| {
            CliError::Usage("bench needs --scan or --data (or `scan`/`data` in the config file)".into())
        })?;
        let db = source.load()?;
        let n = a.queries.or(file.queries).unwrap_or(100);
        let ids = db.registry().ids();
        let scans: Vec<Scan> = db
            .records()
            .iter()
            .take(n)
            .map(|r| {
                Scan::new(
                    ids.iter()
                        .zip(r.rssi.as_slice())
                        .filter(|(_, &v)| v > 0.0)
                        .map(|(id, &v)| (id.clone(), denormalize_rssi(v)))
                        .collect(),
                )
            })
            .collect();
        (scans, json!({ "data": source, "dataset_hash": db.content_hash(), "queries": n }))
    } else {
        let scans = scan_paths.iter().map(Scan::load).collect::<std::result::Result<Vec<_>, _>>()?;
        (scans, json!({ "scans": scan_paths }))
    };
    let report = latency_benchmark(&model, &queries, repetitions)?;

    let model_bytes = fs::read(&model_path).map_err(|e| io_err(&model_path, e))?;
    let provenance = json!({
        "command": "bench",
        "model": model_path,
        "model_sha256": sha256_hex(&model_bytes),
        "queries": query_source,
        "repetitions": repetitions,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let dir = make_run_dir(&out, &provenance)?;
    let average = report.average_ms;
    let n = report.per_query_ms.len();
    emit_report(&Report { provenance, result: report }, dir.join("latency.json"), ReportFormat::Json)?;
    println!("average {average:.4} ms over {n} timed queries -> {}", dir.display());
    Ok(())
}
