mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use theta_lab::characters::{character_table, parse_irrep};
use theta_lab::domain::{analyze_point, sample_exterior, sample_theta_image, PointReport, Region, ThetaPoint};
use theta_lab::experiments::{
    dihedral_family_report, moment_profile_inequivalence, prop_inequiv_check, unbdd_growth, ExperimentReport,
};
use theta_lab::groups::{generate_group, GroupSpec};
use theta_lab::hilbert::{
    default_window, minimal_vector, moment_profile, projection_ij_matrix, projection_matrix, ModuleTruncation,
};
use theta_lab::io::{parse_point, parse_poly, table_entries, ComplexOut, ElementJson, PolyJson};
use theta_lab::models::{certify_pure_isometry, random_theta_unitary, verify_theta_unitary, SymbolTuple};
use theta_lab::poly::{express_in_invariants, jacobian, theta_map};
use theta_lab::Error;

use config::{Format, RunConfig};
use output::{table_csv, Output};

/// Invalid arguments or input files; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Failure::Usage(msg),
            Error::UnknownIrrep(label) => Failure::Usage(format!("unknown irrep {label}")),
            other => Failure::Compute(other),
        }
    }
}

type CmdResult = Result<Output, Failure>;

#[derive(Parser)]
#[command(
    name = "theta-lab",
    version,
    about = "Reflection groups, quotient domains of the polydisc and their Hilbert modules"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Output format (overrides the config file).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// RNG seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` file with tol_roots, tol_matrix, degree, seed, group_cap, format.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Add wall-clock runtime to the report; reports are then no longer reproducible byte for byte.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Elements and character tables of G(m,p,n).
    #[command(subcommand)]
    Group(GroupCmd),
    /// The basic invariants θ and their Jacobian.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Membership and distinguished-boundary tests for points of Θₙ.
    #[command(subcommand)]
    Domain(DomainCmd),
    /// Isotypic projections and moment profiles on truncated modules.
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Operator-model certificates.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Inequivalence and growth experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Args)]
struct Mpn {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    n: usize,
}

impl Mpn {
    fn spec(&self) -> Result<GroupSpec, Failure> {
        GroupSpec::new(self.m, self.p, self.n).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum GroupCmd {
    List(Mpn),
    Table(Mpn),
}

#[derive(Subcommand)]
enum ThetaCmd {
    Map(Mpn),
    Jacobian(Mpn),
    /// Rewrites an invariant polynomial in the basic invariants.
    Express {
        #[command(flatten)]
        group: Mpn,
        /// Polynomial as {"vars": n, "terms": [{"exp": [...], "re": x, "im": y}]}.
        #[arg(long)]
        poly: String,
    },
}

#[derive(Args)]
struct PointArgs {
    /// Coordinates (θ₁, …, θₙ) as a JSON array, e.g. '[{"re":2},{"re":1}]'.
    #[arg(long)]
    point: String,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleRegion {
    Torus,
    ClosedPolydisc,
    Exterior,
}

#[derive(Subcommand)]
enum DomainCmd {
    Membership(PointArgs),
    Boundary(PointArgs),
    /// Seeded sample points of θ(𝕋ⁿ), θ(closed polydisc) or of the exterior.
    Sample {
        #[command(flatten)]
        group: Mpn,
        #[arg(long, value_enum, default_value = "torus")]
        region: SampleRegion,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn parse_group(s: &str) -> Result<GroupSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected m,p,n".into());
    }
    let m = parts[0].parse().map_err(|_| format!("bad m in {s}"))?;
    let p = parts[1].parse().map_err(|_| format!("bad p in {s}"))?;
    let n = parts[2].parse().map_err(|_| format!("bad n in {s}"))?;
    GroupSpec::new(m, p, n).map_err(|e| e.to_string())
}

fn parse_entry(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(',').ok_or("expected i,j")?;
    let i: usize = i.trim().parse().map_err(|_| format!("bad index in {s}"))?;
    let j: usize = j.trim().parse().map_err(|_| format!("bad index in {s}"))?;
    if i == 0 || j == 0 {
        return Err("indices are 1-based".into());
    }
    Ok((i - 1, j - 1))
}

#[derive(Subcommand)]
enum ModuleCmd {
    /// Matrix of P_ϱ or P_ϱ^{ij} on the degree window.
    Project {
        /// Group as m,p,n.
        #[arg(long, value_parser = parse_group)]
        group: GroupSpec,
        #[arg(long)]
        irrep: String,
        #[arg(long)]
        lambda: f64,
        /// Degree window (defaults to the config value, then a per-n default).
        #[arg(long)]
        degree: Option<u32>,
        /// Matrix entry i,j (1-based) for P_ϱ^{ij}.
        #[arg(long, value_parser = parse_entry)]
        entry: Option<(usize, usize)>,
    },
    /// Minimal vector of an isotype and its moment profile.
    Profile {
        #[arg(long, value_parser = parse_group)]
        group: GroupSpec,
        #[arg(long)]
        irrep: String,
        #[arg(long)]
        lambda: f64,
        /// Largest weighted degree of the invariant monomials.
        #[arg(long, default_value_t = 4)]
        d: u32,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Compares the moment profiles of two isotypes.
    Compare {
        #[arg(long, value_parser = parse_group)]
        group: GroupSpec,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 4)]
        d: u32,
    },
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// Symbol checks, falsifier and Toeplitz residuals for a symbol tuple.
    PureIso {
        /// JSON file {"p","n","r","A"}.
        #[arg(long)]
        symbols: PathBuf,
        #[arg(long, default_value_t = 20)]
        cutoff: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Verifies a seeded random Θₙ-unitary of size r.
    ThetaUnitary {
        #[arg(long, value_parser = parse_group)]
        group: GroupSpec,
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    Inequiv {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: f64,
    },
    Unbdd {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 100)]
        mmax: usize,
    },
    Dihedral {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let cfg = match resolve_config(&cli.global) {
        Ok(c) => c,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    match run(cli.command, &cfg) {
        Ok(out) => {
            let runtime = cli.global.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            print!("{}", out.render(cfg.format, runtime));
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("computation failed: {e}");
            ExitCode::from(3)
        }
    }
}

fn resolve_config(g: &GlobalOpts) -> Result<RunConfig, UsageError> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = g.format {
        cfg.format = f;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn tolerance(flag: Option<f64>, fallback: f64) -> Result<f64, Failure> {
    match flag {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(Failure::Usage(format!("--tol must be positive, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(fallback),
    }
}

fn run(cmd: Command, cfg: &RunConfig) -> CmdResult {
    match cmd {
        Command::Group(c) => group(c, cfg),
        Command::Theta(c) => theta(c),
        Command::Domain(c) => domain(c, cfg),
        Command::Module(c) => module(c, cfg),
        Command::Certify(c) => certify(c, cfg),
        Command::Experiment(c) => experiment(c),
    }
}

fn group(cmd: GroupCmd, cfg: &RunConfig) -> CmdResult {
    match cmd {
        GroupCmd::List(g) => {
            let spec = g.spec()?;
            let elements: Vec<ElementJson> = generate_group(&spec, cfg.group_cap)?
                .iter()
                .map(ElementJson::from)
                .collect();
            let rows = elements.iter().map(|e| {
                vec![
                    join(e.perm.iter().map(|x| x.to_string())),
                    join(e.phases.iter().map(|x| x.to_string())),
                ]
            });
            let csv = table_csv(&["perm", "phases"], rows);
            Ok(Output::new(
                "group list",
                json!({"group": spec.to_string(), "order": elements.len(), "elements": elements}),
            )
            .with_csv(csv))
        }
        GroupCmd::Table(g) => {
            let spec = g.spec()?;
            let table = character_table(&spec)?;
            let entries = table_entries(&table);
            let rows = entries.iter().map(|e| {
                vec![
                    e.irrep.clone(),
                    join(e.class.perm.iter().map(|x| x.to_string())),
                    join(e.class.phases.iter().map(|x| x.to_string())),
                    e.class_size.to_string(),
                    fmt(e.value[0]),
                    fmt(e.value[1]),
                ]
            });
            let csv = table_csv(&["irrep", "class_perm", "class_phases", "class_size", "re", "im"], rows);
            let irreps: Vec<String> = table.irreps.iter().map(|i| i.to_string()).collect();
            Ok(Output::new(
                "group table",
                json!({"group": spec.to_string(), "irreps": irreps, "entries": entries}),
            )
            .with_csv(csv))
        }
    }
}

fn join(it: impl Iterator<Item = String>) -> String {
    it.collect::<Vec<_>>().join(" ")
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn theta(cmd: ThetaCmd) -> CmdResult {
    match cmd {
        ThetaCmd::Map(g) => {
            let tm = theta_map(&g.spec()?)?;
            let comps: Vec<PolyJson> = tm.components.iter().map(PolyJson::from).collect();
            Ok(Output::new(
                "theta map",
                json!({"group": tm.spec.to_string(), "degrees": tm.degrees(), "components": comps}),
            ))
        }
        ThetaCmd::Jacobian(g) => {
            let tm = theta_map(&g.spec()?)?;
            let j = jacobian(&tm);
            Ok(Output::new(
                "theta jacobian",
                json!({"group": tm.spec.to_string(), "degree": j.degree(), "jacobian": PolyJson::from(&j)}),
            ))
        }
        ThetaCmd::Express { group, poly } => {
            let tm = theta_map(&group.spec()?)?;
            let f = parse_poly(&poly)?;
            let g = express_in_invariants(&f, &tm)?;
            Ok(Output::new(
                "theta express",
                json!({"group": tm.spec.to_string(), "degrees": tm.degrees(), "expression": PolyJson::from(&g)}),
            ))
        }
    }
}

#[derive(Serialize)]
struct RootOut {
    re: f64,
    im: f64,
    modulus: f64,
}

fn point_body(rep: &PointReport, verdict: &str) -> serde_json::Value {
    let roots: Vec<RootOut> = rep
        .disk
        .roots
        .iter()
        .map(|r| {
            let z = ComplexOut::from(r.root);
            RootOut {
                re: z.re,
                im: z.im,
                modulus: r.modulus,
            }
        })
        .collect();
    json!({
        "verdict": verdict,
        "membership": rep.membership,
        "distinguished_boundary": rep.shilov.verdict,
        "roots": roots,
        "subverdicts": {"a": rep.shilov.a, "b": rep.shilov.b, "c": rep.shilov.c},
        "subverdicts_agree": rep.shilov.agree(),
        "relation_residual": rep.shilov.relation_residual,
        "schur_cohn": rep.disk.location,
        "companion": rep.disk.companion_location,
        "tol": rep.disk.tol,
    })
}

fn domain(cmd: DomainCmd, cfg: &RunConfig) -> CmdResult {
    match cmd {
        DomainCmd::Membership(a) => {
            let tol = tolerance(a.tol, cfg.tol_roots)?;
            let rep = analyze_point(&ThetaPoint::new(parse_point(&a.point)?, a.p), tol)?;
            let verdict = serde_json::to_value(rep.membership).expect("json");
            Ok(Output::new(
                "domain membership",
                point_body(&rep, verdict.as_str().expect("string")),
            ))
        }
        DomainCmd::Boundary(a) => {
            let tol = tolerance(a.tol, cfg.tol_roots)?;
            let rep = analyze_point(&ThetaPoint::new(parse_point(&a.point)?, a.p), tol)?;
            let verdict = if rep.shilov.verdict {
                "distinguished-boundary"
            } else {
                "not-distinguished-boundary"
            };
            Ok(Output::new("domain boundary", point_body(&rep, verdict)))
        }
        DomainCmd::Sample {
            group,
            region,
            count,
            tol,
        } => {
            let spec = group.spec()?;
            let tol = tolerance(tol, cfg.tol_roots)?;
            let points = match region {
                SampleRegion::Torus => sample_theta_image(&spec, Region::Torus, count, cfg.seed)?,
                SampleRegion::ClosedPolydisc => sample_theta_image(&spec, Region::ClosedPolydisc, count, cfg.seed)?,
                SampleRegion::Exterior => sample_exterior(&spec, count, cfg.seed)?,
            };
            let mut out = Vec::with_capacity(points.len());
            let mut rows = Vec::with_capacity(points.len());
            for pt in &points {
                let rep = analyze_point(pt, tol)?;
                let coords: Vec<ComplexOut> = pt.coords.iter().map(|&z| ComplexOut::from(z)).collect();
                let mut row: Vec<String> = coords.iter().flat_map(|c| [fmt(c.re), fmt(c.im)]).collect();
                row.push(
                    serde_json::to_value(rep.membership)
                        .expect("json")
                        .as_str()
                        .expect("string")
                        .into(),
                );
                row.push(rep.shilov.verdict.to_string());
                rows.push(row);
                out.push(json!({
                    "point": coords,
                    "membership": rep.membership,
                    "distinguished_boundary": rep.shilov.verdict,
                }));
            }
            let mut header: Vec<String> = (1..=spec.n())
                .flat_map(|i| [format!("re{i}"), format!("im{i}")])
                .collect();
            header.push("membership".into());
            header.push("distinguished_boundary".into());
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let region_name = match region {
                SampleRegion::Torus => "torus",
                SampleRegion::ClosedPolydisc => "closed-polydisc",
                SampleRegion::Exterior => "exterior",
            };
            Ok(Output::new(
                "domain sample",
                json!({"group": spec.to_string(), "region": region_name, "seed": cfg.seed, "points": out}),
            )
            .with_csv(table_csv(&header, rows)))
        }
    }
}

fn window(flag: Option<u32>, cfg: &RunConfig, spec: &GroupSpec) -> u32 {
    flag.or(cfg.degree).unwrap_or_else(|| default_window(spec.n()))
}

fn module(cmd: ModuleCmd, cfg: &RunConfig) -> CmdResult {
    match cmd {
        ModuleCmd::Project {
            group,
            irrep,
            lambda,
            degree,
            entry,
        } => {
            let label = parse_irrep(&irrep, &group)?;
            let trunc = ModuleTruncation::new(group.n(), lambda, window(degree, cfg, &group))?;
            let proj = match entry {
                None => projection_matrix(&label, &trunc, &group)?,
                Some((i, j)) => projection_ij_matrix(&label, i, j, &trunc, &group)?,
            };
            let m = &proj.matrix.matrix;
            let mut entries = Vec::new();
            let mut rows = Vec::new();
            for c in 0..m.ncols() {
                for r in 0..m.nrows() {
                    let z = m[(r, c)];
                    if z.re != 0.0 || z.im != 0.0 {
                        let z = ComplexOut::from(z);
                        rows.push(vec![r.to_string(), c.to_string(), fmt(z.re), fmt(z.im)]);
                        entries.push(json!({"row": r, "col": c, "re": z.re, "im": z.im}));
                    }
                }
            }
            Ok(Output::new(
                "module project",
                json!({
                    "group": group.to_string(),
                    "irrep": label.to_string(),
                    "entry": entry.map(|(i, j)| [i + 1, j + 1]),
                    "lambda": lambda,
                    "degree": trunc.max_degree,
                    "dim": trunc.len(),
                    "rank": proj.rank(),
                    "basis": trunc.basis,
                    "entries": entries,
                }),
            )
            .with_csv(table_csv(&["row", "col", "re", "im"], rows)))
        }
        ModuleCmd::Profile {
            group,
            irrep,
            lambda,
            d,
            degree,
        } => {
            let label = parse_irrep(&irrep, &group)?;
            let trunc = ModuleTruncation::new(group.n(), lambda, window(degree, cfg, &group))?;
            let v = minimal_vector(&group, &label, 0, &trunc)?;
            let profile = moment_profile(&group, &label, 0, &trunc, d)?;
            let rows = profile.iter().map(|e| {
                vec![
                    join(e.q.iter().map(|x| x.to_string())),
                    e.weighted_degree.to_string(),
                    fmt(e.value),
                ]
            });
            let csv = table_csv(&["q", "weighted_degree", "value"], rows);
            Ok(Output::new(
                "module profile",
                json!({
                    "group": group.to_string(),
                    "irrep": label.to_string(),
                    "lambda": lambda,
                    "minimal_vector": PolyJson::from(&v),
                    "profile": profile,
                }),
            )
            .with_csv(csv))
        }
        ModuleCmd::Compare {
            group,
            first,
            second,
            lambda,
            d,
        } => {
            let a = parse_irrep(&first, &group)?;
            let b = parse_irrep(&second, &group)?;
            let cmp = moment_profile_inequivalence(&group, lambda, &a, &b, d)?;
            let rows = cmp.first.iter().zip(&cmp.second).map(|(x, y)| {
                vec![
                    join(x.q.iter().map(|v| v.to_string())),
                    x.weighted_degree.to_string(),
                    fmt(x.value),
                    fmt(y.value),
                ]
            });
            let csv = table_csv(&["q", "weighted_degree", "first", "second"], rows);
            Ok(Output::new(
                "module compare",
                json!({
                    "group": group.to_string(),
                    "first_irrep": a.to_string(),
                    "second_irrep": b.to_string(),
                    "lambda": lambda,
                    "comparison": cmp,
                }),
            )
            .with_csv(csv))
        }
    }
}

fn certify(cmd: CertifyCmd, cfg: &RunConfig) -> CmdResult {
    match cmd {
        CertifyCmd::PureIso { symbols, cutoff, tol } => {
            let tol = tolerance(tol, cfg.tol_matrix)?;
            let text =
                std::fs::read_to_string(&symbols).map_err(|e| Failure::Usage(format!("{}: {e}", symbols.display())))?;
            let s = SymbolTuple::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", symbols.display())))?;
            let rep = certify_pure_isometry(&s, cutoff, tol, cfg.seed)?;
            let verdict = if rep.passed { "pass" } else { "fail" };
            Ok(Output::new(
                "certify pure-iso",
                json!({"verdict": verdict, "tol": tol, "seed": cfg.seed, "report": rep}),
            ))
        }
        CertifyCmd::ThetaUnitary { group, size, tol } => {
            let tol = tolerance(tol, cfg.tol_matrix)?;
            let t = random_theta_unitary(&group, size, cfg.seed)?;
            let rep = verify_theta_unitary(&t, &group, tol)?;
            let verdict = if rep.passed { "pass" } else { "fail" };
            Ok(Output::new(
                "certify theta-unitary",
                json!({"verdict": verdict, "group": group.to_string(), "size": size, "tol": tol, "seed": cfg.seed, "report": rep}),
            ))
        }
    }
}

fn experiment(cmd: ExperimentCmd) -> CmdResult {
    let (name, rep): (&'static str, ExperimentReport) = match cmd {
        ExperimentCmd::Inequiv { n, lambda } => ("experiment inequiv", prop_inequiv_check(n, lambda)?),
        ExperimentCmd::Unbdd { lambda, mmax } => ("experiment unbdd", unbdd_growth(lambda, mmax)?),
        ExperimentCmd::Dihedral { k, lambda, degree } => {
            ("experiment dihedral", dihedral_family_report(k, lambda, degree)?)
        }
    };
    let csv = rep.to_csv();
    Ok(Output::new(name, rep).with_csv(csv))
}
