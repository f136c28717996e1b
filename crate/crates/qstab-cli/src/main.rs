//! Batch command-line front end: exact lattice checks, stability tables,
//! inducing verdicts, the A₂ geometry, and CKZ monodromy reports, all with
//! machine-readable output.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use qstab::a2;
use qstab::ckz::{self, TransportOptions};
use qstab::error::Error;
use qstab::qinduce::{self, DXObject};
use qstab::qlattice::{KClass, QLattice};
use qstab::quiver::QuiverData;
use qstab::repalg::PathAlgebraA;
use qstab::ring::parse_complex;
use qstab::stability::{DObject, HeartCharge, MinGldimOptions, StabilityContext};

#[derive(Parser)]
#[command(
    name = "qstab",
    version,
    about = "Exact q-deformed root-lattice algebra, stability conditions on type-A hearts, and CKZ monodromy",
    after_help = "Output is JSON on stdout (floats fixed to 17 significant digits) unless a \
                  subcommand is documented as CSV; every run echoes its resolved configuration."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct QuiverArg {
    /// Preset name ("A2", "D4", "E8", "Kronecker"), a JSON literal, or a path
    /// to a JSON file {"vertices": n, "arrows": [[i, j], ...]}
    #[arg(long)]
    quiver: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the q-deformed Cartan matrix (entries as Laurent strings)
    Cartan {
        #[command(flatten)]
        quiver: QuiverArg,
        /// Specialize q ↦ e^{iπs} at this s (integer s is sign-exact)
        #[arg(long = "at-q")]
        at_q: Option<String>,
    },
    /// Positive roots and the Coxeter number of an ADE quiver
    Roots {
        #[command(flatten)]
        quiver: QuiverArg,
    },
    /// Exact Hecke quadratic and braid/commuting relation report
    HeckeCheck {
        #[command(flatten)]
        quiver: QuiverArg,
    },
    /// Apply a braid word to a K-class (twist action on the lattice)
    Twist {
        #[command(flatten)]
        quiver: QuiverArg,
        /// Signed generator list, e.g. "1,2,-1"
        #[arg(long)]
        word: String,
        /// K-class as a JSON array of Laurent strings, e.g. '["1","q"]'
        #[arg(long)]
        class: Option<String>,
    },
    /// Semistable table and global dimension of a heart charge
    Gldim {
        #[command(flatten)]
        quiver: QuiverArg,
        /// "mass@phase" tokens, e.g. "1@5/6,1@1/6"; phases may be fractions
        /// or decimals
        #[arg(long)]
        charge: String,
    },
    /// Minimize the global dimension over heart charges
    MinGldim {
        #[command(flatten)]
        quiver: QuiverArg,
        /// Maximum number of gldim evaluations
        #[arg(long, default_value_t = 60_000)]
        budget: usize,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify the induced q-stability data at parameter s
    Induce {
        #[command(flatten)]
        quiver: QuiverArg,
        #[arg(long)]
        charge: String,
        /// Complex parameter, e.g. "3.0" or "2.5+0.5i"
        #[arg(long)]
        s: String,
    },
    /// Harder–Narasimhan filtration of an object
    Hn {
        #[command(flatten)]
        quiver: QuiverArg,
        #[arg(long)]
        charge: String,
        /// Summands like "1..2 + S1[1]"; with --s, shifts "[m+lX]" are allowed
        #[arg(long)]
        object: String,
        /// When present, filter in the X-graded category at this parameter
        #[arg(long)]
        s: Option<String>,
    },
    /// The explicit A2 example: Gepner charge and fundamental domain
    A2 {
        #[command(subcommand)]
        cmd: A2Cmd,
    },
    /// CKZ monodromy report at a single ν (JSON) or over a ν-grid (CSV)
    Ckz {
        #[command(subcommand)]
        cmd: Option<CkzCmd>,
        /// ADE preset, e.g. "A3"
        #[arg(long = "type")]
        quiver_type: Option<String>,
        /// Complex parameter ν
        #[arg(long)]
        nu: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Evaluate a K-class (and optionally a braid word) at q = (−1)^N
    Reduce {
        #[command(flatten)]
        quiver: QuiverArg,
        /// K-class as a JSON array of Laurent strings
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: i64,
        /// Optional braid word; the commuting square with the reduced word is
        /// reported
        #[arg(long)]
        word: Option<String>,
    },
}

#[derive(Subcommand)]
enum A2Cmd {
    /// Solve the Gepner equation on charges
    Gepner {
        #[arg(long)]
        s: String,
    },
    /// Classify a point of the z-plane against the fundamental domain
    Domain {
        /// Complex coordinate, e.g. "0.6+0.0i"
        #[arg(long)]
        z: String,
        #[arg(long)]
        s: String,
    },
    /// CSV membership sample of the fundamental domain
    /// (columns: x, y, status)
    DomainSample {
        #[arg(long)]
        s: String,
        /// Subdivisions per axis (even values sample the real axis)
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum CkzCmd {
    /// CSV of Hecke/braid residuals over a ν-grid "start:end:step"
    /// (columns: nu, max_hecke_residual, max_braid_residual, ode_steps)
    Sweep {
        #[arg(long = "type")]
        quiver_type: String,
        #[arg(long = "nu-grid")]
        nu_grid: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Exploratory trace comparison between the monodromy and lattice
    /// representations; words are semicolon-separated, e.g. "1;1,2;2,-1"
    Compare {
        #[arg(long = "type")]
        quiver_type: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        words: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

/// serde_json formatter pinning floats to 17 significant digits so repeated
/// runs are byte-identical.
#[derive(Default)]
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value.serialize(&mut ser).expect("JSON serialization");
    String::from_utf8(out).expect("UTF-8 JSON")
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_word(text: &str) -> Result<Vec<i64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad braid word letter {t:?}")))
        })
        .collect()
}

fn context_for(quiver: &QuiverData) -> Result<StabilityContext, Error> {
    Ok(StabilityContext::new(PathAlgebraA::new(quiver.clone())?))
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.cmd {
        Cmd::Cartan { quiver, at_q } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let qc = q.q_cartan();
            let n = q.vertex_count();
            let config = json!({
                "command": "cartan",
                "quiver": q.to_json_string(),
                "at_q": at_q,
            });
            let result = match at_q {
                None => {
                    let rows: Vec<Vec<String>> = qc
                        .rows()
                        .iter()
                        .map(|r| r.iter().map(|e| e.to_string()).collect())
                        .collect();
                    json!({ "entries": rows, "skew_symmetric": qc.is_skew_symmetric() })
                }
                Some(text) => {
                    // the flag takes the value of q itself; q = ±1 is exact
                    let qv = parse_complex(&text)?;
                    if qv.im == 0.0 && (qv.re == 1.0 || qv.re == -1.0) {
                        let parity = if qv.re == 1.0 { 0 } else { 1 };
                        let rows: Vec<Vec<i64>> = (1..=n)
                            .map(|i| {
                                (1..=n)
                                    .map(|j| qc.entry(i, j).eval_at_sign(parity))
                                    .collect::<Result<_, _>>()
                            })
                            .collect::<Result<_, _>>()?;
                        json!({ "entries": rows, "exact": true })
                    } else {
                        let rows: Vec<Vec<(f64, f64)>> = (1..=n)
                            .map(|i| {
                                (1..=n)
                                    .map(|j| {
                                        qc.entry(i, j).eval_at(qv).map(|v| (v.re, v.im))
                                    })
                                    .collect::<Result<_, _>>()
                            })
                            .collect::<Result<_, _>>()?;
                        json!({ "entries": rows, "exact": false })
                    }
                }
            };
            Ok(to_json(&json!({ "config": config, "result": result })))
        }
        Cmd::Roots { quiver } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let rs = q.root_system()?;
            let config = json!({ "command": "roots", "quiver": q.to_json_string() });
            let result = json!({
                "dynkin": rs.dynkin().to_string(),
                "coxeter_number": rs.coxeter_number(),
                "count": rs.positive_roots().len(),
                "positive_roots": rs.positive_roots(),
            });
            Ok(to_json(&json!({ "config": config, "result": result })))
        }
        Cmd::HeckeCheck { quiver } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let lattice = QLattice::new(q.clone());
            let hecke: Vec<bool> = (1..=q.vertex_count())
                .map(|i| lattice.verify_hecke_quadratic(i))
                .collect::<Result<_, _>>()?;
            let report = lattice.verify_braid_relations();
            let config = json!({ "command": "hecke-check", "quiver": q.to_json_string() });
            let result = json!({
                "hecke_quadratic": hecke,
                "all_hecke_pass": hecke.iter().all(|&b| b),
                "pairs": report.pairs,
                "all_asserted_pass": report.all_asserted_pass(),
            });
            Ok(to_json(&json!({ "config": config, "result": result })))
        }
        Cmd::Twist { quiver, word, class } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let lattice = QLattice::new(q.clone());
            let word = parse_word(&word)?;
            let matrix = lattice.braid_word_matrix(&word)?;
            let rows: Vec<Vec<String>> = matrix
                .rows()
                .iter()
                .map(|r| r.iter().map(|e| e.to_string()).collect())
                .collect();
            let image = match &class {
                Some(text) => {
                    let x: KClass = serde_json::from_str(text)
                        .map_err(|e| Error::Parse(format!("K-class JSON: {e}")))?;
                    Some(lattice.braid_word_apply(&word, &x)?)
                }
                None => None,
            };
            let config = json!({
                "command": "twist",
                "quiver": q.to_json_string(),
                "word": word,
                "class": class,
            });
            Ok(to_json(&json!({
                "config": config,
                "result": { "matrix": rows, "image": image },
            })))
        }
        Cmd::Gldim { quiver, charge } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let ctx = context_for(&q)?;
            let c = HeartCharge::parse(&charge, q.vertex_count())?;
            let result = ctx.gldim(&c)?;
            let config = json!({
                "command": "gldim",
                "quiver": q.to_json_string(),
                "charge": charge,
            });
            let witness = result.witness.as_ref().map(|w| {
                json!({
                    "from": ctx.algebra().display_module(&w.from),
                    "to": ctx.algebra().display_module(&w.to),
                    "degree": w.degree,
                })
            });
            Ok(to_json(&json!({
                "config": config,
                "result": {
                    "semistables": result.table.rows,
                    "gldim": result.value.as_f64(),
                    "gldim_exact": result.value.as_exact().map(|r| [*r.numer(), *r.denom()]),
                    "witness_pair": witness,
                },
            })))
        }
        Cmd::MinGldim { quiver, budget, starts, seed } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let ctx = context_for(&q)?;
            let opts = MinGldimOptions { budget, starts, seed };
            let result = ctx.min_gldim_search(&opts)?;
            let config = json!({
                "command": "min-gldim",
                "quiver": q.to_json_string(),
                "budget": budget,
                "starts": starts,
                "seed": seed,
            });
            let charge_tokens: Vec<String> = result
                .charge
                .masses()
                .iter()
                .zip(result.charge.phases())
                .map(|(m, p)| format!("{}@{}", m, p.as_f64()))
                .collect();
            Ok(to_json(&json!({
                "config": config,
                "result": {
                    "charge": charge_tokens.join(","),
                    "value": result.value,
                    "evals": result.evals,
                    "budget_exhausted": result.budget_exhausted,
                },
            })))
        }
        Cmd::Induce { quiver, charge, s } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let ctx = context_for(&q)?;
            let c = HeartCharge::parse(&charge, q.vertex_count())?;
            let s = parse_complex(&s)?;
            let verdict = qinduce::classify(&ctx, &c, s)?;
            let config = json!({
                "command": "induce",
                "quiver": q.to_json_string(),
                "charge": charge,
                "s": [s.re, s.im],
            });
            Ok(to_json(&json!({ "config": config, "result": verdict })))
        }
        Cmd::Hn { quiver, charge, object, s } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let ctx = context_for(&q)?;
            let c = HeartCharge::parse(&charge, q.vertex_count())?;
            let config = json!({
                "command": "hn",
                "quiver": q.to_json_string(),
                "charge": charge,
                "object": object,
                "s": s,
            });
            let result = match s {
                None => {
                    let obj = DObject::parse(ctx.algebra(), &object)?;
                    let factors = ctx.hn_filtration(&c, &obj)?;
                    let rows: Vec<_> = factors
                        .iter()
                        .map(|f| {
                            json!({
                                "class": f.class,
                                "phase": f.phase.as_f64(),
                                "parts": f.parts.iter().map(|(m, shift)| {
                                    format!("{}[{}]", ctx.algebra().display_module(m), shift)
                                }).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    json!({ "factors": rows })
                }
                Some(text) => {
                    let s = parse_complex(&text)?;
                    let obj = DXObject::parse(&ctx, &object)?;
                    let factors = qinduce::hn_dx(&ctx, &c, s, &obj)?;
                    let rows: Vec<_> = factors
                        .iter()
                        .map(|f| {
                            json!({
                                "class": f.class,
                                "phase": f.phase.value(s.re),
                                "parts": f.parts.iter().map(|(m, z, x)| {
                                    format!("{}[{}+{}X]", ctx.algebra().display_module(m), z, x)
                                }).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    json!({ "factors": rows })
                }
            };
            Ok(to_json(&json!({ "config": config, "result": result })))
        }
        Cmd::A2 { cmd } => match cmd {
            A2Cmd::Gepner { s } => {
                let s = parse_complex(&s)?;
                let g = a2::gepner_charge(s);
                let config = json!({ "command": "a2 gepner", "s": [s.re, s.im] });
                Ok(to_json(&json!({ "config": config, "result": g })))
            }
            A2Cmd::Domain { z, s } => {
                let z = parse_complex(&z)?;
                let s = parse_complex(&s)?;
                let pos = a2::in_fundamental_domain(z, s)?;
                let config = json!({
                    "command": "a2 domain",
                    "z": [z.re, z.im],
                    "s": [s.re, s.im],
                });
                Ok(to_json(&json!({ "config": config, "result": { "position": pos } })))
            }
            A2Cmd::DomainSample { s, grid } => {
                let s = parse_complex(&s)?;
                let samples = a2::domain_sample(s, grid)?;
                let mut out = String::new();
                out.push_str(&format!("# command=a2 domain-sample s={},{} grid={grid}\n", fmt_f(s.re), fmt_f(s.im)));
                out.push_str("x,y,status\n");
                for (x, y, pos) in samples {
                    out.push_str(&format!("{},{},{pos}\n", fmt_f(x), fmt_f(y)));
                }
                Ok(out)
            }
        },
        Cmd::Ckz { cmd, quiver_type, nu, tol } => match cmd {
            Some(CkzCmd::Sweep { quiver_type, nu_grid, tol }) => {
                let q = QuiverData::preset(&quiver_type)?;
                let opts = TransportOptions { tol, ..Default::default() };
                let parts: Vec<&str> = nu_grid.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("nu-grid {nu_grid:?} is not start:end:step")));
                }
                let (start, end, step): (f64, f64, f64) = (
                    parts[0].parse().map_err(|_| Error::Parse("bad grid start".into()))?,
                    parts[1].parse().map_err(|_| Error::Parse("bad grid end".into()))?,
                    parts[2].parse().map_err(|_| Error::Parse("bad grid step".into()))?,
                );
                if step <= 0.0 {
                    return Err(Error::Parse("grid step must be positive".into()));
                }
                let mut out = String::new();
                out.push_str(&format!(
                    "# command=ckz sweep type={quiver_type} nu-grid={nu_grid} tol={}\n",
                    fmt_f(tol)
                ));
                out.push_str("nu,max_hecke_residual,max_braid_residual,ode_steps\n");
                let mut nu = start;
                while nu <= end + 1e-12 {
                    let report = ckz::monodromy_report(&q, Complex64::new(nu, 0.0), &opts)?;
                    let max_hecke =
                        report.hecke_residuals.iter().copied().fold(0.0f64, f64::max);
                    let max_braid =
                        report.braid.iter().map(|b| b.residual).fold(0.0f64, f64::max);
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt_f(nu),
                        fmt_f(max_hecke),
                        fmt_f(max_braid),
                        report.ode_steps
                    ));
                    nu += step;
                }
                Ok(out)
            }
            Some(CkzCmd::Compare { quiver_type, nu, words, tol }) => {
                let q = QuiverData::preset(&quiver_type)?;
                let nu = parse_complex(&nu)?;
                let opts = TransportOptions { tol, ..Default::default() };
                let word_list: Vec<Vec<i64>> = words
                    .split(';')
                    .map(|w| if w.trim().is_empty() { Ok(Vec::new()) } else { parse_word(w) })
                    .collect::<Result<_, _>>()?;
                let rows = ckz::compare_algebraic(&q, nu, &word_list, &opts)?;
                let config = json!({
                    "command": "ckz compare",
                    "type": quiver_type,
                    "nu": [nu.re, nu.im],
                    "words": word_list,
                    "tol": tol,
                });
                Ok(to_json(&json!({ "config": config, "result": rows })))
            }
            None => {
                let quiver_type = quiver_type.ok_or_else(|| {
                    Error::Parse("ckz requires --type and --nu (or the sweep subcommand)".into())
                })?;
                let nu = nu.ok_or_else(|| Error::Parse("ckz requires --nu".into()))?;
                let q = QuiverData::preset(&quiver_type)?;
                let nu = parse_complex(&nu)?;
                let opts = TransportOptions { tol, ..Default::default() };
                let report = ckz::monodromy_report(&q, nu, &opts)?;
                let config = json!({
                    "command": "ckz",
                    "type": quiver_type,
                    "nu": [nu.re, nu.im],
                    "tol": tol,
                });
                Ok(to_json(&json!({ "config": config, "result": report })))
            }
        },
        Cmd::Reduce { quiver, class, n, word } => {
            let q = QuiverData::from_spec(&quiver.quiver)?;
            let lattice = QLattice::new(q.clone());
            let x: KClass = serde_json::from_str(&class)
                .map_err(|e| Error::Parse(format!("K-class JSON: {e}")))?;
            let reduced = lattice.n_reduce(&x, n)?;
            let config = json!({
                "command": "reduce",
                "quiver": q.to_json_string(),
                "class": class,
                "n": n,
                "word": word,
            });
            let result = match word {
                None => json!({ "reduced": reduced }),
                Some(text) => {
                    let word = parse_word(&text)?;
                    let applied = lattice.braid_word_apply(&word, &x)?;
                    let lhs = lattice.n_reduce(&applied, n)?;
                    // reduced word acting on the reduced class
                    let mut rhs = reduced.clone();
                    for &g in &word {
                        let i = g.unsigned_abs() as usize;
                        let m = if g > 0 {
                            lattice.twist_matrix(i)?.eval_at_sign(n)?
                        } else {
                            lattice.twist_inv_matrix(i)?.eval_at_sign(n)?
                        };
                        rhs = qstab::qlattice::apply_int_matrix(&m, &rhs)?;
                    }
                    json!({
                        "reduced": reduced,
                        "word_then_reduce": lhs,
                        "reduce_then_word": rhs,
                        "commutes": lhs == rhs,
                    })
                }
            };
            Ok(to_json(&json!({ "config": config, "result": result })))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(output.as_bytes());
            if !output.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
