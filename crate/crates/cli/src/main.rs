//! `zsdeform`: exact deformations, certified enclosures of the deformation
//! maps, verification suites and dimension estimates from the command line.

mod cache;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cache::Cache;
use zsdeform_core::compositions::{Tail, TailSpec};
use zsdeform_core::deform_map::{
    continuous_part, curve, curve_csv, dyadic_grid, eta_tail, fn_enclosure, fn_preimage,
    hn_value, jump_part, Budget, CurveKind, JumpSite,
};
use zsdeform_core::fractal::{
    box_count_dim, cantor_points, dim_json, e2_points, e2_residual, moran_solve, points_csv,
    power_schedule, SimilitudeFamily,
};
use zsdeform_core::rational::{self, ExactRational};
use zsdeform_core::series::{series_delta, series_en, series_gn, series_jump_total};
use zsdeform_core::verify::{self, Status, SuiteConfig};
use zsdeform_core::{tn_exact, Composition, DeformKey, Enclosure};

const DIGITS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "zsdeform", version, about = "Rational deformations of multiple zeta-star values")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Deformation level n >= 1.
    #[arg(short = 'n', long = "level", global = true, default_value_t = 1)]
    n: u32,
    /// Sequence entries read from a point's binary expansion.
    #[arg(long, global = true, default_value_t = Budget::default().depth)]
    depth: usize,
    /// Largest jump-site weight enumerated explicitly.
    #[arg(long, global = true, default_value_t = Budget::default().weight_cutoff)]
    weight_cutoff: u64,
    /// Power-series truncation order.
    #[arg(long, global = true, default_value_t = Budget::default().order)]
    order: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl Common {
    fn budget(&self) -> Budget {
        Budget {
            depth: self.depth,
            weight_cutoff: self.weight_cutoff,
            order: self.order,
        }
    }

    fn budget_key(&self) -> String {
        format!("n={};depth={};W={};M={}", self.n, self.depth, self.weight_cutoff, self.order)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TailArg {
    Ones,
    Twos,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesArg {
    /// e_n, the all-ones tail function
    E,
    /// g_n, the all-twos tail function
    G,
    /// Delta_n = e_n - (1 + t_n)
    Delta,
    /// generating function of the total jump mass
    Jump,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SetArg {
    E2,
    Cantor,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact T_n(k) as num/den.
    Tn {
        #[arg(short = 'k', long)]
        composition: Composition,
    },
    /// eta_n at an eventually constant sequence: prefix -k, then the tail.
    Eta {
        #[arg(short = 'k', long)]
        prefix: Option<String>,
        #[arg(long, value_enum)]
        tail: TailArg,
    },
    /// F_n(x).
    Fn {
        #[arg(long)]
        x: String,
    },
    /// h_n at a jump site (--site k or --at dyadic point), or H_n(x) with --x.
    Hn {
        #[arg(long, conflicts_with_all = ["at", "x"])]
        site: Option<Composition>,
        #[arg(long, conflicts_with = "x")]
        at: Option<String>,
        #[arg(long)]
        x: Option<String>,
    },
    /// G_n(x) = F_n(x) + H_n(x).
    Gn {
        #[arg(long)]
        x: String,
    },
    /// Sample fn, hn or gn on a dyadic grid; CSV columns x,lo,hi.
    Curve {
        function: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Run a verification suite (or "all"); exit code 1 unless every check passes.
    Verify {
        suite: String,
        /// Weight budget for suites that enumerate compositions.
        #[arg(short = 'W', long)]
        weight: Option<u64>,
        /// Restrict to the level given by -n instead of the suite's default levels.
        #[arg(long)]
        only_level: bool,
    },
    /// Dump a certified series as JSON.
    Series {
        #[arg(value_enum)]
        which: SeriesArg,
    },
    /// x with F_n(x) close to y.
    Preimage {
        #[arg(long)]
        y: String,
        /// Bracket width, as 2^-bits.
        #[arg(long, default_value_t = 36)]
        bits: u64,
    },
    /// Similarity dimension and box-counting estimate.
    Dim {
        #[arg(value_enum, default_value_t = SetArg::E2)]
        set: SetArg,
        /// Cantor ratio denominator.
        #[arg(long, default_value_t = 3)]
        m: u64,
        /// Truncation depth (digits for Cantor sets, weight for E_2).
        #[arg(long = "set-depth")]
        set_depth: Option<u32>,
        /// Write the point set as CSV here.
        #[arg(long)]
        points_out: Option<PathBuf>,
    },
}

fn parse_point(s: &str) -> Result<ExactRational> {
    rational::parse(s).with_context(|| format!("not a rational number: {s}"))
}

fn enclosure_text(e: &Enclosure, format: Format, label: &str) -> String {
    match format {
        Format::Json => json!({
            "quantity": label,
            "lo": rational::to_text(e.lo()),
            "hi": rational::to_text(e.hi()),
            "interval": e.to_decimal(DIGITS),
            "preview": e.to_pm(DIGITS),
        })
        .to_string() + "\n",
        Format::Csv => format!(
            "quantity,lo,hi\n{},{},{}\n",
            label,
            rational::to_decimal(e.lo(), DIGITS, false),
            rational::to_decimal(e.hi(), DIGITS, true)
        ),
        Format::Text => format!("{}\n{}\n", e.to_decimal(DIGITS), e.to_pm(DIGITS)),
    }
}

fn cached_enclosure(
    cache: Option<&Cache>,
    key: String,
    compute: impl FnOnce() -> zsdeform_core::Result<Enclosure>,
) -> Result<Enclosure> {
    let text = Cache::get_or_insert(cache, &key, || {
        Ok(serde_json::to_string(&compute()?)?)
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a command; `Ok(false)` means a verification failed.
fn run(cli: Cli) -> Result<bool> {
    let c = &cli.common;
    let cache = Cache::from_env();
    let cache = cache.as_ref();
    let budget = c.budget();
    let n = c.n;
    let out = match cli.cmd {
        Cmd::Tn { composition } => {
            let key = DeformKey::new(n, composition);
            let text = Cache::get_or_insert(cache, &format!("tn;{}", key.canonical()), || {
                Ok(rational::to_text(&tn_exact(&key)?))
            })?;
            let v = parse_point(&text)?;
            match c.format {
                Format::Json => json!({"value": text, "preview": Enclosure::point(v).to_pm(DIGITS)}).to_string() + "\n",
                Format::Csv => format!("value\n{text}\n"),
                Format::Text => format!("{text}\n{}\n", Enclosure::point(v).to_pm(DIGITS)),
            }
        }
        Cmd::Eta { prefix, tail } => {
            let prefix: Composition = match prefix.as_deref() {
                None | Some("") => Composition::empty(),
                Some(p) => p.parse()?,
            };
            let tail = match tail {
                TailArg::Ones => Tail::AllOnes,
                TailArg::Twos => Tail::AllTwos,
            };
            let t = TailSpec::new(prefix, tail);
            let e = cached_enclosure(cache, format!("eta;n={n};t={t};M={}", c.order), || {
                eta_tail(n, &t, c.order)
            })?;
            enclosure_text(&e, c.format, &format!("eta_{n}({t})"))
        }
        Cmd::Fn { x } => {
            let x = parse_point(&x)?;
            let e = cached_enclosure(
                cache,
                format!("fn;x={};{}", rational::to_text(&x), c.budget_key()),
                || fn_enclosure(n, &x, &budget),
            )?;
            enclosure_text(&e, c.format, &format!("F_{n}({})", rational::to_text(&x)))
        }
        Cmd::Hn { site, at, x } => {
            if let Some(x) = x {
                let x = parse_point(&x)?;
                let e = cached_enclosure(
                    cache,
                    format!("Hn;x={};{}", rational::to_text(&x), c.budget_key()),
                    || jump_part(n, &x, &budget),
                )?;
                enclosure_text(&e, c.format, &format!("H_{n}({})", rational::to_text(&x)))
            } else {
                let site = match (site, at) {
                    (Some(k), None) => JumpSite::new(k)?,
                    (None, Some(y)) => JumpSite::at(&parse_point(&y)?)?,
                    _ => bail!("give one of --site, --at or --x"),
                };
                let e = cached_enclosure(
                    cache,
                    format!("hn;n={n};k={};M={}", site.composition, c.order),
                    || hn_value(n, &site, c.order),
                )?;
                enclosure_text(&e, c.format, &format!("h_{n}({})", rational::to_text(&site.point)))
            }
        }
        Cmd::Gn { x } => {
            let x = parse_point(&x)?;
            let e = cached_enclosure(
                cache,
                format!("gn;x={};{}", rational::to_text(&x), c.budget_key()),
                || continuous_part(n, &x, &budget),
            )?;
            enclosure_text(&e, c.format, &format!("G_{n}({})", rational::to_text(&x)))
        }
        Cmd::Curve { function, points } => {
            let kind: CurveKind = function.parse()?;
            if points == 0 {
                bail!("--points must be positive");
            }
            let rows = curve(kind, n, &dyadic_grid(points), &budget)?;
            match c.format {
                Format::Json => {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|(x, e)| json!({"x": rational::to_text(x), "lo": rational::to_text(e.lo()), "hi": rational::to_text(e.hi())}))
                        .collect();
                    serde_json::to_string(&v)? + "\n"
                }
                _ => curve_csv(&rows),
            }
        }
        Cmd::Verify { suite, weight, only_level } => {
            let cfg = SuiteConfig {
                levels: only_level.then(|| vec![n]),
                weight,
                budget,
            };
            let reports = verify::run_suite(&suite, &cfg)?;
            let status = verify::overall(&reports);
            let text = match c.format {
                Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
                _ => {
                    let mut s = String::new();
                    for r in &reports {
                        writeln!(s, "{r}")?;
                    }
                    writeln!(s, "{suite}: {status}")?;
                    s
                }
            };
            emit(c, &text)?;
            return Ok(status == Status::Pass);
        }
        Cmd::Series { which } => {
            let s = match which {
                SeriesArg::E => series_en(n, c.order)?,
                SeriesArg::G => series_gn(n, c.order)?,
                SeriesArg::Delta => series_delta(n, c.order)?,
                SeriesArg::Jump => series_jump_total(n, c.order)?,
            };
            s.to_json() + "\n"
        }
        Cmd::Preimage { y, bits } => {
            let y = parse_point(&y)?;
            let p = fn_preimage(n, &y, &rational::pow2_neg(bits), &budget)?;
            match c.format {
                Format::Json => json!({
                    "x": rational::to_text(&p.x),
                    "bracket": p.bracket.to_decimal(DIGITS),
                    "fx": p.fx.to_pm(DIGITS),
                })
                .to_string() + "\n",
                _ => format!(
                    "x = {}\nbracket {}\nF_{n}(x) = {}\n",
                    rational::to_text(&p.x),
                    p.bracket.to_decimal(DIGITS),
                    p.fx.to_pm(DIGITS)
                ),
            }
        }
        Cmd::Dim { set, m, set_depth, points_out } => {
            let tol = rational::pow2_neg(50);
            let (family, pts, schedule) = match set {
                SetArg::E2 => {
                    let d = set_depth.unwrap_or(20);
                    (SimilitudeFamily::e2(), e2_points(d)?, power_schedule(2, 4, d.saturating_sub(6).max(5)))
                }
                SetArg::Cantor => {
                    let d = set_depth.unwrap_or(12);
                    let top = d.saturating_sub(2).max(3);
                    (SimilitudeFamily::cantor(m)?, cantor_points(m, d)?, power_schedule(m, 2.min(top - 1), top))
                }
            };
            let s = moran_solve(&family, &tol)?;
            let est = box_count_dim(&pts, &schedule)?;
            if let Some(p) = points_out {
                std::fs::write(&p, points_csv(&pts)).with_context(|| format!("writing {}", p.display()))?;
            }
            let residual = (set == SetArg::E2).then(|| e2_residual(&s.mid()));
            match c.format {
                Format::Json => json!({
                    "similarity_dimension": s.to_pm(15),
                    "residual": residual.map(|r| r.to_pm(3)),
                    "box_count": serde_json::from_str::<serde_json::Value>(&dim_json(&est))?,
                })
                .to_string() + "\n",
                _ => {
                    let mut t = format!("similarity dimension {}\n", s.to_pm(15));
                    if let Some(r) = residual {
                        writeln!(t, "residual 2^(2s) - 2^s - 1 = {}", r.to_pm(3))?;
                    }
                    writeln!(
                        t,
                        "box count {:.6} (stderr {:.2e}, eps {:.3e}..{:.3e}, {} points)",
                        est.value, est.stderr, est.eps_range.0, est.eps_range.1, pts.len()
                    )?;
                    t
                }
            }
        }
    };
    emit(c, &out)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
