//! Dispatch of a validated [`RunConfig`] and writing of its artifacts.

use std::io::Write;
use std::path::{Path, PathBuf};

use lhz_core::meanfield::{self, StationaryKind};
use lhz_core::model::lhz_counts;
use lhz_core::phasediag::{
    self, critical_magnetization, CriticalMethod, CriticalPoint, Crossing, TransitionLine,
};
use lhz_core::spectrum::{self, GapClass, LogFit, ScalingFit};

use crate::args::{Job, Physics, RunConfig};
use crate::error::CliError;
use crate::output::{Body, Document, Format, Table, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    Stderr,
    File(PathBuf),
}

/// One rendered output and where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub destination: Destination,
    pub content: String,
}

/// Run `config` on its own thread pool, then write every artifact.
///
/// Nothing is written until all results are computed; if a write fails the
/// files already written by this run are removed.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let artifacts = render(config)?;
    write_all(&artifacts)
}

/// Compute and render without touching the filesystem.
pub fn render(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    pool.install(|| execute(config))
}

fn write_all(artifacts: &[Artifact]) -> Result<(), CliError> {
    let mut written: Vec<&Path> = Vec::new();
    for a in artifacts {
        if let Destination::File(path) = &a.destination {
            if let Err(e) = std::fs::write(path, &a.content) {
                for p in written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(CliError::Io(format!(
                    "cannot write {}: {e}",
                    path.display()
                )));
            }
            written.push(path);
        }
    }
    for a in artifacts {
        let res = match a.destination {
            Destination::Stdout => std::io::stdout().lock().write_all(a.content.as_bytes()),
            Destination::Stderr => std::io::stderr().lock().write_all(a.content.as_bytes()),
            Destination::File(_) => Ok(()),
        };
        res.map_err(|e| CliError::Io(format!("cannot write output: {e}")))?;
    }
    Ok(())
}

fn primary(config: &RunConfig) -> Destination {
    config
        .out
        .clone()
        .map_or(Destination::Stdout, Destination::File)
}

fn execute(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let meta = config.meta.clone();
    let doc = |body: Body, extra: Vec<(String, Value)>| Document {
        body,
        extra,
        meta: meta.clone(),
    };
    let single = |d: Document| {
        vec![Artifact {
            destination: primary(config),
            content: d.render(config.format),
        }]
    };

    Ok(match &config.job {
        Job::FreeEnergy {
            physics,
            control,
            m_points,
        } => {
            let pts =
                meanfield::landscape(*control, physics.temperature, physics.couplings, *m_points)?;
            let rows = pts.iter().map(|p| vec![p.m.into(), p.f.into()]).collect();
            single(doc(table(&["m", "f"], rows), vec![]))
        }
        Job::SolveM { physics, control } => {
            let report =
                meanfield::find_stationary_points(*control, physics.temperature, physics.couplings);
            let rows = report
                .stationary
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let kind = match p.kind {
                        StationaryKind::Minimum => "minimum",
                        StationaryKind::Maximum => "maximum",
                    };
                    vec![
                        p.m.into(),
                        p.f.into(),
                        Value::str(kind),
                        (i == report.global).into(),
                        p.degenerate.into(),
                        p.residual.into(),
                    ]
                })
                .collect();
            let g = report.global_minimum();
            let ties = report.degenerate_global_minima().len();
            single(doc(
                table(
                    &["m", "f", "kind", "global", "degenerate", "residual"],
                    rows,
                ),
                vec![
                    ("global_m".into(), g.m.into()),
                    ("global_f".into(), g.f.into()),
                    ("degenerate_global_minima".into(), ties.into()),
                ],
            ))
        }
        Job::PhaseLine { physics, grid } => {
            let line = trace(physics, *grid)?;
            let ids = line.segment_ids();
            let rows = line
                .points
                .iter()
                .zip(&ids)
                .map(|(p, id)| {
                    vec![
                        p.s.into(),
                        p.tau_star.into(),
                        p.m_low.into(),
                        p.m_high.into(),
                        p.jump.into(),
                        (*id).into(),
                    ]
                })
                .collect();
            single(doc(
                table(
                    &["s", "tau_star", "m_low", "m_high", "jump", "segment_id"],
                    rows,
                ),
                vec![
                    ("segments".into(), line.segments.len().into()),
                    ("critical_point".into(), critical_value(line.critical_point)),
                ],
            ))
        }
        Job::JumpProfile { physics, grid } => {
            let line = trace(physics, *grid)?;
            let ids = line.segment_ids();
            let rows = phasediag::jump_profile(&line)
                .into_iter()
                .zip(ids)
                .map(|((s, jump), id)| vec![s.into(), jump.into(), id.into()])
                .collect();
            single(doc(
                table(&["s", "jump", "segment_id"], rows),
                vec![("segments".into(), line.segments.len().into())],
            ))
        }
        Job::CriticalPoint { physics, grid } => {
            let cp = if physics.temperature.is_zero() && physics.couplings.is_uniform() {
                phasediag::critical_point_closed_form(physics.couplings.j())?
            } else {
                trace(physics, *grid)?.critical_point.ok_or_else(|| {
                    CliError::Domain(
                        "no critical point: the transition line has no interior end where the jump vanishes"
                            .into(),
                    )
                })?
            };
            let m_c = match cp.method {
                CriticalMethod::ClosedForm => Value::Float(critical_magnetization()),
                CriticalMethod::Numeric => Value::Null,
            };
            single(doc(
                Body::Record(vec![
                    ("s_c".into(), cp.s_c.into()),
                    ("tau_c".into(), cp.tau_c.into()),
                    ("r_star".into(), (cp.tau_c.ln() / cp.s_c.ln()).into()),
                    ("m_c".into(), m_c),
                    ("method".into(), Value::str(method_name(cp.method))),
                ]),
                vec![],
            ))
        }
        Job::ScheduleCheck {
            physics,
            grid,
            family,
        } => {
            let line = trace(physics, *grid)?;
            let (result, s, tau, distance) = match phasediag::schedule_crossing(*family, &line) {
                Crossing::Crosses { s, tau } => ("crosses", Some(s), Some(tau), 0.0),
                Crossing::Tangent { s, tau, distance } => ("tangent", Some(s), Some(tau), distance),
                Crossing::Avoids { distance } => ("avoids", None, None, distance),
            };
            let jump = s.and_then(|s| line.interpolate(s)).map(|(_, jump)| jump);
            single(doc(
                Body::Record(vec![
                    ("r".into(), family.r().into()),
                    ("result".into(), Value::str(result)),
                    ("s".into(), Value::opt_float(s)),
                    ("tau".into(), Value::opt_float(tau)),
                    ("jump".into(), Value::opt_float(jump)),
                    ("distance".into(), distance.into()),
                ]),
                vec![
                    ("segments".into(), line.segments.len().into()),
                    ("critical_point".into(), critical_value(line.critical_point)),
                ],
            ))
        }
        Job::Gap { n, control, j } => {
            let g = spectrum::gap_at(*n, *control, *j)?;
            let row = vec![
                g.n.into(),
                g.s.into(),
                g.tau.into(),
                g.e0.into(),
                g.e1.into(),
                g.gap.into(),
            ];
            single(doc(
                table(&["N", "s", "tau", "E0", "E1", "gap"], vec![row]),
                vec![],
            ))
        }
        Job::GapScaling { ns, family, j } => {
            let fit = spectrum::gap_scaling(ns, *family, *j)?;
            gap_scaling_artifacts(config, &fit)
        }
        Job::LhzCounts { nl } => {
            let c = lhz_counts(*nl)?;
            single(doc(
                Body::Record(vec![
                    ("N_l".into(), c.logical.into()),
                    ("N".into(), c.physical.into()),
                    ("N_c".into(), c.constraints.into()),
                ]),
                vec![],
            ))
        }
    })
}

fn trace(physics: &Physics, grid: phasediag::SGrid) -> Result<TransitionLine, CliError> {
    Ok(phasediag::trace_line(
        physics.temperature,
        physics.couplings,
        grid,
    )?)
}

fn table(columns: &[&'static str], rows: Vec<Vec<Value>>) -> Body {
    Body::Table(Table {
        columns: columns.to_vec(),
        rows,
    })
}

fn method_name(m: CriticalMethod) -> &'static str {
    match m {
        CriticalMethod::ClosedForm => "closed-form",
        CriticalMethod::Numeric => "numeric",
    }
}

fn critical_value(cp: Option<CriticalPoint>) -> Value {
    cp.map_or(Value::Null, |cp| {
        Value::object([
            ("s_c", cp.s_c.into()),
            ("tau_c", cp.tau_c.into()),
            ("method", Value::str(method_name(cp.method))),
        ])
    })
}

fn fit_value(f: &LogFit) -> Value {
    Value::object([("a", f.a.into()), ("b", f.b.into()), ("rss", f.rss.into())])
}

fn gap_scaling_artifacts(config: &RunConfig, fit: &ScalingFit) -> Vec<Artifact> {
    let rows = fit
        .minima
        .iter()
        .map(|m| vec![m.n.into(), m.s_min.into(), m.gap_min.into()])
        .collect();
    let classification = match fit.classification {
        GapClass::Exponential => "exponential",
        GapClass::Polynomial => "polynomial",
        GapClass::Ambiguous => "ambiguous",
    };
    let summary: Vec<(String, Value)> = vec![
        ("r".into(), fit.r.into()),
        ("J".into(), fit.j.into()),
        ("exp_fit".into(), fit_value(&fit.exp_fit)),
        ("poly_fit".into(), fit_value(&fit.poly_fit)),
        ("rss_ratio".into(), fit.rss_ratio().into()),
        ("classification".into(), Value::str(classification)),
        (
            "excluded".into(),
            Value::List(fit.excluded.iter().map(|&n| n.into()).collect()),
        ),
        (
            "warnings".into(),
            Value::List(fit.warnings.iter().map(Value::str).collect()),
        ),
    ];

    let mut artifacts = Vec::new();
    for w in &fit.warnings {
        artifacts.push(Artifact {
            destination: Destination::Stderr,
            content: format!("lhz: warning: {w}\n"),
        });
    }
    let table_body = table(&["N", "s_min", "gap_min"], rows);
    match config.format {
        Format::Json => {
            let doc = Document {
                body: table_body,
                extra: summary.clone(),
                meta: config.meta.clone(),
            };
            artifacts.push(Artifact {
                destination: primary(config),
                content: doc.to_json(),
            });
            if let Some(p) = &config.fit_out {
                artifacts.push(sidecar(Destination::File(p.clone()), summary, config));
            }
        }
        Format::Csv => {
            let doc = Document {
                body: table_body,
                extra: vec![],
                meta: config.meta.clone(),
            };
            artifacts.push(Artifact {
                destination: primary(config),
                content: doc.to_csv(),
            });
            let dest = match (&config.fit_out, &config.out) {
                (Some(p), _) => Destination::File(p.clone()),
                (None, Some(out)) => Destination::File(sidecar_path(out)),
                (None, None) => Destination::Stderr,
            };
            artifacts.push(sidecar(dest, summary, config));
        }
    }
    artifacts
}

fn sidecar(
    destination: Destination,
    summary: Vec<(String, Value)>,
    config: &RunConfig,
) -> Artifact {
    let doc = Document {
        body: Body::Record(summary),
        extra: vec![],
        meta: config.meta.clone(),
    };
    Artifact {
        destination,
        content: doc.to_json(),
    }
}

/// `dir/name.csv` becomes `dir/name.fit.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "gap-scaling".into());
    out.with_file_name(format!("{stem}.fit.json"))
}
