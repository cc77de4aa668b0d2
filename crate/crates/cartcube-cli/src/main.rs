//! `cartcube`: run checks and decision procedures on JSON inputs.
//!
//! Exit codes: 0 PASS, 1 FAIL, 2 BUDGET, 3 input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cartcube::certificate::Certificate;
use cartcube::checks::{run_check, run_suite, CheckArgs, Manifest};
use cartcube::cofib::{factor_cof_tfib, trivial_fibration_structure, CofibrationClass};
use cartcube::cube::build_site;
use cartcube::fib::{factor_tcof_fib, fibration_structure, Mode, Route, SmallObjectLimits};
use cartcube::fincat::{FinCatJson, Site};
use cartcube::homotopy::{pi0, weak_homotopy_equivalence, TestObject};
use cartcube::interval::check_root_adjunction;
use cartcube::nerve::{check_universe_omega, cubical_nerve, universe};
use cartcube::presheaf::{NatTrans, NatTransJson, PresheafJson, Psh};
use cartcube::report::{CheckReport, Verdict};
use cartcube::search::Budget;
use cartcube::Error;

#[derive(Parser)]
#[command(name = "cartcube", version, about = "Exhaustive checks on truncated Cartesian cubical sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Out {
    /// Write the full JSON report here (`-` for stdout).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Search {
    /// Search budget in nodes; defaults to $CARTCUBE_BUDGET, then 50M.
    #[arg(long)]
    budget: Option<u64>,
    /// Cofibration class: all-monos, isos-only or excluding-diagonal.
    #[arg(long, default_value = "all-monos")]
    class: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registered check.
    Check {
        name: String,
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// For root-adjunction: the presheaf A in Hom(A^I, X) = Hom(A, X_I).
        #[arg(long, requires = "rhs")]
        lhs: Option<PathBuf>,
        /// For root-adjunction: the presheaf X.
        #[arg(long, requires = "lhs")]
        rhs: Option<PathBuf>,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        out: Out,
    },
    /// Run the checks listed in a manifest, or all of them.
    Suite {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Decide whether a map is a trivial fibration.
    TfibCheck {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        trunc: Option<usize>,
        #[command(flatten)]
        search: Search,
        /// Write the certificate of a positive answer here.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Decide whether a map carries a uniform fibration structure.
    FibCheck {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "unbiased")]
        mode: String,
        #[arg(long, default_value = "both")]
        route: String,
        #[arg(long)]
        trunc: Option<usize>,
        #[command(flatten)]
        search: Search,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Factor a map in one of the two weak factorization systems.
    Factor {
        #[arg(long)]
        map: PathBuf,
        /// cof-tfib or tcof-fib.
        #[arg(long)]
        system: String,
        #[command(flatten)]
        search: Search,
        /// Write the two factors here as JSON maps.
        #[arg(long)]
        factors: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Replay a certificate without searching.
    Verify {
        cert: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Count connected components of a presheaf on a cube site.
    Pi0 {
        file: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Test a map for weak homotopy equivalence against the objects in DIR.
    Whe {
        #[arg(long)]
        map: PathBuf,
        /// Directory of presheaf JSON files, used in file-name order.
        #[arg(long)]
        tests: PathBuf,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        out: Out,
    },
    /// The cubical nerve of a finite category.
    Nerve {
        #[arg(long)]
        cat: PathBuf,
        /// `cube:N`.
        #[arg(long)]
        site: String,
        /// Write the nerve as presheaf JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// The universe of α-small families.
    Universe {
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        /// omega (α = 2 only) or presheaves.
        #[arg(long, default_value = "omega")]
        check: String,
        #[arg(long, default_value_t = 2)]
        trunc: usize,
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let budget = e.downcast_ref::<Error>().is_some_and(|e| matches!(e, Error::Budget { .. } | Error::HomBudget { .. }));
            eprintln!("error: {e:#}");
            ExitCode::from(if budget { 2 } else { 3 })
        }
    }
}

fn default_budget() -> anyhow::Result<u64> {
    match std::env::var("CARTCUBE_BUDGET") {
        Ok(v) => v.trim().parse().with_context(|| format!("CARTCUBE_BUDGET={v:?} is not a node count")),
        Err(_) => Ok(Budget::DEFAULT),
    }
}

fn budget(flag: Option<u64>) -> anyhow::Result<u64> {
    flag.map_or_else(default_budget, Ok)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid input", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if path == Path::new("-") {
        let mut out = std::io::stdout().lock();
        return match writeln!(out, "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        };
    }
    fs::write(path, format!("{text}\n")).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> anyhow::Result<()> {
    write_text(path, &serde_json::to_string_pretty(v)?)
}

fn load_map(path: &Path, trunc: Option<usize>) -> anyhow::Result<NatTrans> {
    let j: NatTransJson = read_json(path)?;
    let f = j.to_nat_trans()?;
    if let Some(n) = trunc {
        let have = f.src().site().cube().map(|d| d.n);
        if have != Some(n) {
            bail!("{} lives on {}, not on □≤{n}", path.display(), site_name(f.src().site()));
        }
    }
    Ok(f)
}

fn load_presheaf(path: &Path) -> anyhow::Result<Psh> {
    let j: PresheafJson = read_json(path)?;
    Ok(j.to_presheaf()?.into_psh())
}

fn site_name(site: &Site) -> String {
    site.cube().map_or_else(|| format!("a site with {} objects", site.num_objects()), |d| format!("□≤{}", d.n))
}

/// Prints a summary line, writes the JSON report if asked, and returns the
/// exit code of the verdict.
fn finish(r: &CheckReport, out: &Out) -> anyhow::Result<u8> {
    summarize(r, to_stdout(out));
    if let Some(path) = &out.json {
        write_json(path, r)?;
    }
    Ok(r.verdict.exit_code() as u8)
}

fn to_stdout(out: &Out) -> bool {
    out.json.as_deref() == Some(Path::new("-"))
}

/// One line per report, plus the first few failure details. Goes to stderr
/// when the JSON report occupies stdout.
fn summarize(r: &CheckReport, quiet: bool) {
    let counters: Vec<String> = r.counters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut lines = vec![format!("{}: {:?}  {}  digest {}", r.check, r.verdict, counters.join(" "), &r.digest()[..16])];
    if r.verdict != Verdict::Pass {
        lines.extend(first_details(r).into_iter().take(3).map(|d| format!("  {d}")));
    }
    for l in lines {
        if quiet {
            eprintln!("{l}");
        } else {
            println!("{l}");
        }
    }
}

fn first_details(r: &CheckReport) -> Vec<String> {
    if r.verdict == Verdict::Pass {
        return Vec::new();
    }
    let mut out: Vec<String> = r.details.clone();
    for p in &r.parts {
        out.extend(first_details(p).into_iter().map(|d| format!("{}: {d}", p.check)));
    }
    out
}

fn find_certificate(r: &CheckReport) -> Option<&Value> {
    r.certificate.as_ref().or_else(|| r.parts.iter().find_map(find_certificate))
}

fn write_certificate(r: &CheckReport, path: &Option<PathBuf>) -> anyhow::Result<()> {
    let Some(path) = path else { return Ok(()) };
    let cert = find_certificate(r).ok_or_else(|| anyhow!("the report has no certificate to write"))?;
    write_json(path, cert)
}

fn run(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Check { name, trunc, seed, samples, lhs, rhs, search, out } => {
            let b = budget(search.budget)?;
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                if name != "root-adjunction" {
                    bail!("--lhs/--rhs only apply to root-adjunction");
                }
                let a = load_presheaf(&lhs)?;
                let x = load_presheaf(&rhs)?;
                if !a.site().same_as(x.site()) {
                    bail!("--lhs and --rhs live on different sites");
                }
                let r = check_root_adjunction(&a, &x, &mut Budget::new(b))?;
                return finish(&r, &out);
            }
            let d = CheckArgs::default();
            let args = CheckArgs {
                trunc: trunc.unwrap_or(d.trunc),
                seed: seed.unwrap_or(d.seed),
                samples,
                budget: b,
                class: search.class,
            };
            finish(&run_check(&name, &args)?, &out)
        }
        Command::Suite { manifest, workers, trunc, seed, budget: flag, out } => {
            let m = match &manifest {
                Some(p) => read_json::<Manifest>(p)?,
                None => Manifest::all(),
            };
            let d = CheckArgs::default();
            let base = CheckArgs {
                trunc: trunc.unwrap_or(d.trunc),
                seed: seed.unwrap_or(d.seed),
                budget: budget(flag)?,
                ..d
            };
            let entries = m.resolve(&base)?;
            let workers = workers.or(m.workers).unwrap_or(1);
            let reports = run_suite(&entries, workers)?;
            let mut verdict = Verdict::Pass;
            for r in &reports {
                summarize(r, to_stdout(&out));
                verdict = verdict.and(r.verdict);
            }
            if let Some(path) = &out.json {
                let digests: Vec<String> = reports.iter().map(CheckReport::digest).collect();
                write_json(path, &json!({"verdict": verdict, "digests": digests, "reports": reports}))?;
            }
            Ok(verdict.exit_code() as u8)
        }
        Command::TfibCheck { map, trunc, search, cert, out } => {
            let f = load_map(&map, trunc)?;
            let class = CofibrationClass::by_name(f.src().site(), &search.class)?;
            let t = trivial_fibration_structure(&f, &class, &mut Budget::new(budget(search.budget)?))?;
            write_certificate(&t.report, &cert)?;
            finish(&t.report, &out)
        }
        Command::FibCheck { map, mode, route, trunc, search, cert, out } => {
            let f = load_map(&map, trunc)?;
            let class = CofibrationClass::by_name(f.src().site(), &search.class)?;
            let a = fibration_structure(
                &f,
                &class,
                Mode::by_name(&mode)?,
                Route::by_name(&route)?,
                &mut Budget::new(budget(search.budget)?),
            )?;
            write_certificate(&a.report, &cert)?;
            finish(&a.report, &out)
        }
        Command::Factor { map, system, search, factors, cert, out } => {
            let f = load_map(&map, None)?;
            let class = CofibrationClass::by_name(f.src().site(), &search.class)?;
            let mut b = Budget::new(budget(search.budget)?);
            let (parts, r) = match system.as_str() {
                "cof-tfib" => {
                    let (fac, r) = factor_cof_tfib(&f, &class, &mut b)?;
                    (Some((fac.left, fac.right)), r)
                }
                "tcof-fib" => {
                    let (fac, r) = factor_tcof_fib(&f, &class, SmallObjectLimits::default(), &mut b)?;
                    (fac.map(|x| (x.left, x.right)), r)
                }
                other => bail!("unknown factorization system `{other}`; use cof-tfib or tcof-fib"),
            };
            if let (Some(path), Some((l, rt))) = (&factors, &parts) {
                let j = json!({"left": NatTransJson::from_nat_trans(l), "right": NatTransJson::from_nat_trans(rt)});
                write_json(path, &j)?;
            }
            write_certificate(&r, &cert)?;
            finish(&r, &out)
        }
        Command::Verify { cert, out } => {
            let v: Value = read_json(&cert)?;
            let r = Certificate::from_json(&v)?.verify()?;
            finish(&r, &out)
        }
        Command::Pi0 { file, out } => {
            let x = load_presheaf(&file)?;
            let p = pi0(&x)?;
            let mut r = CheckReport::new("pi0").param("site", site_name(x.site()));
            r.count("components", p.count as u64);
            r.set_param("component_of_vertex", json!(p.component));
            finish(&r, &out)
        }
        Command::Whe { map, tests, search, out } => {
            let f = load_map(&map, None)?;
            let class = CofibrationClass::by_name(f.src().site(), &search.class)?;
            let mut files: Vec<PathBuf> = fs::read_dir(&tests)
                .with_context(|| format!("cannot read {}", tests.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            files.retain(|p| p.extension().is_some_and(|e| e == "json"));
            files.sort();
            if files.is_empty() {
                bail!("{} holds no .json test objects", tests.display());
            }
            let mut family = Vec::with_capacity(files.len());
            for p in &files {
                let k = load_presheaf(p)?;
                if !k.site().same_as(f.src().site()) {
                    bail!("{} does not live on the map's site", p.display());
                }
                let name = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
                family.push(TestObject::new(&name, &k));
            }
            let mut r = weak_homotopy_equivalence(&f, &family, &class, &mut Budget::new(budget(search.budget)?))?;
            r.set_param("map", json!([f.src().sizes(), f.tgt().sizes()]));
            finish(&r, &out)
        }
        Command::Nerve { cat, site, output, budget: flag, out } => {
            let c = read_json::<FinCatJson>(&cat)?.to_fincat()?;
            let n: usize = site
                .strip_prefix("cube:")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| anyhow!("--site must look like cube:N, got {site:?}"))?;
            let s = build_site(n)?;
            let nv = cubical_nerve(&c, &s, &mut Budget::new(budget(flag)?))?;
            let mut r = CheckReport::new("nerve").param("site", site_name(&s));
            for (k, n) in nv.obj.sizes().iter().enumerate() {
                r.count(&format!("cells_at_{k}"), *n as u64);
            }
            if let Some(path) = &output {
                write_json(path, &PresheafJson::from_presheaf(&nv.obj))?;
            }
            finish(&r, &out)
        }
        Command::Universe { alpha, check, trunc, budget: flag, out } => {
            let s = build_site(trunc)?;
            let mut b = Budget::new(budget(flag)?);
            let r = match check.as_str() {
                "omega" if alpha == 2 => {
                    let class = CofibrationClass::all_monos(&s);
                    let om = class.omega();
                    check_universe_omega(&s, &om.obj, &om.truth(), &mut b)?
                }
                "omega" => bail!("the comparison with Ω needs α = 2"),
                "presheaves" => universe(alpha, &s, &mut b)?.check_presheaf_count(&mut b)?,
                other => bail!("unknown universe check `{other}`; use omega or presheaves"),
            };
            finish(&r, &out)
        }
    }
}
