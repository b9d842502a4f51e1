//! `precut`: enumerate species, run the verification sweeps, and build Fock
//! tables from the command line.

mod cache;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use precut_core::avoidance::{self, is_irreducible, preset, quotient_or_sub_bimonoid};
use precut_core::fock::{canonical_form, FockBasis};
use precut_core::instances::pairs::{cc_matrix, generate_pair, membership, reconstruct_frames, PairKind, PreorderPair};
use precut_core::instances::parking::{dilation, enumerate_parking, parkize};
use precut_core::setn::{check_dual_commutation, check_partial_pullback};
use precut_core::subset::{self, Subset};
use precut_core::{
    check_bimonoid, check_intertwined, check_species_over_preorders, fock_tables, instance, verify_hopf_axioms,
    FockOptions, FockTable, InstanceRef, Params, Preorder, Square, VerificationReport, Which,
};
use serde_json::{json, Value};

use cache::TableKey;

macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Parser)]
#[command(name = "precut", version, about = "Bimonoid species from cuts of preorders")]
struct Cli {
    /// Worker threads for the parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance name, e.g. perm_f, parking, posets/cherry.
    #[arg(long)]
    instance: String,
    /// Restrict to the elements avoiding a preset (213, 213+132, cherry, pqsym, ...).
    #[arg(long)]
    avoid: Option<String>,
    /// Palette size for colored and tensor.
    #[arg(long, default_value_t = 2)]
    palette: usize,
}

impl InstanceArgs {
    fn name(&self) -> String {
        match &self.avoid {
            Some(a) => format!("{}/{}", self.instance, a),
            None => self.instance.clone(),
        }
    }

    fn build(&self) -> Result<InstanceRef> {
        Ok(instance(&self.name(), &Params { palette: self.palette })?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Preorders,
    Intertwined,
    Bimonoid,
}

#[derive(Subcommand)]
enum Command {
    /// List the elements (or orbit classes) on a ground set of size n.
    Enum {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        n: usize,
        /// List one canonical representative per class instead.
        #[arg(long)]
        classes: bool,
        /// For parking: list single parking filtrations instead of pairs.
        #[arg(long)]
        filtrations: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a verification sweep; exit status 1 when it fails.
    Verify {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, value_enum)]
        check: CheckKind,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        /// Coproduct index for the bimonoid check (both when omitted).
        #[arg(long)]
        delta: Option<u8>,
        #[arg(long)]
        json: bool,
    },
    /// Avoidance presets: counts, irreducibility, inherited structures.
    Avoid {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 2)]
        palette: usize,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Check irreducibility for Delta^1 or Delta^2.
        #[arg(long)]
        check_irreducible: Option<u8>,
    },
    /// Build (or load from the cache) the Fock table of an instance.
    Fock {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 1)]
        delta: u8,
        #[arg(long, default_value_t = 2)]
        mu: u8,
        #[arg(long = "N", default_value_t = 3)]
        n: usize,
        /// Write the table here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Skip the intertwining precondition.
        #[arg(long)]
        force: bool,
        /// Neither read nor write the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Check a square of multimaps read from a JSON file.
    CheckSquare {
        file: PathBuf,
    },
    /// Preorder lattice calculator. Relations are `0<1,1<2,2=3`, or `D`/`C`.
    Preorder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: Option<String>,
    },
    /// Parkize a chain `X_1;X_2;...` of subsets such as `0;0,1;0,1,2`.
    Parking {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        chain: String,
    },
    /// Membership, frames and matrix of a pair of preorders.
    Pairs {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
}

fn which(i: u8) -> Result<Which> {
    Which::from_index(i).ok_or_else(|| anyhow!("index must be 1 or 2, got {i}"))
}

fn parse_subset(n: usize, text: &str) -> Result<Subset> {
    let text = text.trim();
    if text.is_empty() || text == "-" {
        return Ok(0);
    }
    let mut s = 0;
    for part in text.split(',') {
        let x: usize = part.trim().parse().with_context(|| format!("bad label `{part}`"))?;
        if x >= n {
            bail!("label {x} outside 0..{n}");
        }
        s |= subset::singleton(x);
    }
    Ok(s)
}

fn parse_preorder(n: usize, text: &str) -> Result<Preorder> {
    if n > subset::MAX_LABELS {
        bail!("at most {} labels", subset::MAX_LABELS);
    }
    let ground = subset::full(n);
    match text.trim() {
        "D" => return Ok(Preorder::discrete(ground)),
        "C" => return Ok(Preorder::coarse(ground)),
        _ => {}
    }
    let mut pairs = Vec::new();
    for rel in text.split(',').map(str::trim).filter(|r| !r.is_empty()) {
        let (a, b, both) = if let Some((a, b)) = rel.split_once('<') {
            (a, b, false)
        } else if let Some((a, b)) = rel.split_once('=') {
            (a, b, true)
        } else {
            bail!("bad relation `{rel}`, expected `x<y` or `x=y`");
        };
        let (x, y): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        if x >= n || y >= n {
            bail!("relation `{rel}` leaves 0..{n}");
        }
        pairs.push((x, y));
        if both {
            pairs.push((y, x));
        }
    }
    Ok(Preorder::closure(ground, &pairs)?)
}

fn bubbles_json(p: &Preorder) -> Value {
    json!(p.bubbles().into_iter().map(|b| subset::elements(b).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn print_json(v: &Value) -> Result<()> {
    outln!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn print_report(report: &VerificationReport, as_json: bool) -> Result<()> {
    if as_json {
        print_json(&serde_json::to_value(report)?)
    } else {
        let verdict = if report.passed { "pass" } else { "FAIL" };
        outln!("{} on {} up to n={}: {verdict}", report.check, report.instance, report.nmax);
        if let Some(stage) = report.stage {
            outln!("stage: {stage}");
        }
        if let Some(w) = &report.witness {
            outln!("witness: {w}");
        }
        for (k, v) in &report.stats {
            outln!("{k}: {v}");
        }
        Ok(())
    }
}

fn cmd_enum(inst: &InstanceArgs, n: usize, classes: bool, filtrations: bool, format: Format) -> Result<bool> {
    let mut out = std::io::stdout().lock();
    if filtrations {
        if inst.name() != "parking" {
            bail!("--filtrations only applies to the parking instance");
        }
        let all = enumerate_parking(n);
        for f in &all {
            match format {
                Format::Json => writeln!(out, "{}", json!({ "levels": f.describe() }))?,
                Format::Csv | Format::Text => writeln!(out, "{}", f.describe())?,
            }
        }
        eprintln!("{} parking filtrations on {n} elements", all.len());
        return Ok(true);
    }
    let species = inst.build()?;
    let elements = if classes {
        let basis = FockBasis::new(&species, n)?;
        let range = basis.dimensions()[..n].iter().sum::<usize>()..basis.len();
        range.map(|i| basis.repr(i)).collect::<Vec<_>>()
    } else {
        species.elements_std(n)?.as_ref().clone()
    };
    match format {
        Format::Json => {
            let v = json!(elements.iter().map(|e| e.to_json()).collect::<Vec<_>>());
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv | Format::Text => {
            for e in &elements {
                writeln!(out, "{}", e.describe())?;
            }
            eprintln!("{} {} on {n} elements", elements.len(), if classes { "classes" } else { "elements" });
        }
    }
    Ok(true)
}

fn cmd_verify(inst: &InstanceArgs, check: CheckKind, nmax: usize, delta: Option<u8>, as_json: bool) -> Result<bool> {
    let species = inst.build()?;
    let reports = match check {
        CheckKind::Preorders => vec![check_species_over_preorders(&species, nmax)?],
        CheckKind::Intertwined => vec![check_intertwined(&species, nmax)?],
        CheckKind::Bimonoid => {
            let indices = match delta {
                Some(d) => vec![which(d)?],
                None => vec![Which::First, Which::Second],
            };
            indices.into_iter().map(|w| check_bimonoid(&species, w, nmax)).collect::<Result<_, _>>()?
        }
    };
    for r in &reports {
        print_report(r, as_json)?;
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn cmd_avoid(name: &str, preset_name: &str, palette: usize, nmax: usize, irreducible: Option<u8>) -> Result<bool> {
    let parent = instance(name, &Params { palette })?;
    let set = preset(preset_name)?;
    let sub = avoidance::avoiding(parent.clone(), set.clone());
    let nmax = nmax.min(parent.cap());
    let counts: Vec<usize> = (0..=nmax).map(|n| sub.elements_std(n).map(|e| e.len())).collect::<Result<_, _>>()?;
    outln!("{}: labeled counts {counts:?}", sub.name());
    let Some(i) = irreducible else { return Ok(true) };
    let w = which(i)?;
    let report = is_irreducible(&parent, &set, w, nmax)?;
    print_report(&report, false)?;
    if report.passed {
        let (_, roles) = quotient_or_sub_bimonoid(parent, set, w, nmax)?;
        outln!("sub-bimonoid of {}", roles.sub_bimonoid_of);
        outln!("quotient bimonoid of {}", roles.quotient_of);
    }
    Ok(report.passed)
}

#[allow(clippy::too_many_arguments)]
fn cmd_fock(
    inst: &InstanceArgs,
    delta: u8,
    mu: u8,
    n: usize,
    out: Option<&PathBuf>,
    format: Format,
    force: bool,
    no_cache: bool,
) -> Result<bool> {
    let (d, m) = (which(delta)?, which(mu)?);
    let name = inst.name();
    let key = TableKey { instance: &name, palette: inst.palette, delta, mu, n, forced: force };
    let dir = cache::cache_dir();
    let cached = if no_cache { None } else { cache::load(&dir, &key).ok().flatten() };
    let table: FockTable = match cached {
        Some(t) => {
            eprintln!("loaded from cache {}", dir.display());
            t
        }
        None => {
            let species = inst.build()?;
            let t = fock_tables(&species, d, m, n, &FockOptions { force, ..FockOptions::default() })?;
            if !no_cache {
                let path = cache::store(&dir, &key, &t)?;
                eprintln!("cached at {}", path.display());
            }
            t
        }
    };
    let report = verify_hopf_axioms(&table);
    outln!("instance: {}", table.instance);
    outln!("structure: (Delta^{delta}, mu_{mu}), N = {n}");
    outln!("dimensions: {:?}", table.dimensions());
    let nonzero: usize = table.product.values().map(BTreeMap::len).sum();
    outln!("product constants: {nonzero}");
    if let Some(x) = (0..table.len()).find(|&i| table.degree(i) == 1) {
        if let Some(prod) = table.product_of(x, x) {
            let terms: Vec<String> = prod.iter().map(|(c, k)| format!("{k}*[{}]", table.classes[*c].id)).collect();
            outln!("[{}]^2 = {}", table.classes[x].id, terms.join(" + "));
        }
    }
    outln!("hopf axioms: {}", if report.passed { "pass".to_string() } else { format!("FAIL ({})", report.stage.map(|s| s.to_string()).unwrap_or_default()) });
    if let Some(path) = out {
        let bytes = match format {
            Format::Csv => table.to_csv(),
            Format::Json | Format::Text => table.to_json_string(),
        };
        cache::write_atomic(path, bytes.as_bytes())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(report.passed)
}

fn cmd_check_square(file: &PathBuf) -> Result<bool> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let sq: Square = serde_json::from_str(&text)?;
    let pullback = check_partial_pullback(&sq)?;
    let dual = check_dual_commutation(&sq)?;
    print_json(&json!({ "partial_pullback": pullback, "dual_commutation": dual }))?;
    Ok(pullback.holds)
}

fn cmd_preorder(n: usize, p: &str, q: Option<&str>) -> Result<bool> {
    let p = parse_preorder(n, p)?;
    let cuts: Vec<Vec<usize>> = p.cuts().iter().map(|c| subset::elements(c.down).collect()).collect();
    let mut out = json!({
        "p": p,
        "bubbles": bubbles_json(&p),
        "components": bubbles_json(&p.component_partition()),
        "cuts": cuts,
        "opposite": p.opposite(),
        "minimal_total_refinement": p.minimal_total_refinement(),
        "total": p.is_total_preorder(),
        "poset": p.is_poset(),
    });
    if let Some(q) = q {
        let q = parse_preorder(n, q)?;
        out["q"] = json!(q);
        out["meet"] = json!(p.meet(&q)?);
        out["join"] = json!(p.join(&q)?);
        out["p_precedes_q"] = json!(p.precedes(&q)?);
    }
    print_json(&out)?;
    Ok(true)
}

fn cmd_parking(n: usize, chain: &str) -> Result<bool> {
    let ground = subset::full(n);
    let mut sets = vec![0];
    for part in chain.split(';') {
        sets.push(parse_subset(n, part)?);
    }
    let p = dilation(ground, &sets)?;
    let f = parkize(ground, &sets)?;
    let chain_out: Vec<Vec<usize>> = f.chain().iter().map(|&s| subset::elements(s).collect()).collect();
    print_json(&json!({
        "dilation": p,
        "parkization": chain_out,
        "levels": f.describe(),
        "break_points": f.break_points(),
        "bubbles": bubbles_json(&f.preorder()),
    }))?;
    Ok(true)
}

fn cmd_pairs(kind: &str, n: usize, first: &str, second: &str) -> Result<bool> {
    let kind = PairKind::parse(kind).ok_or_else(|| anyhow!("kind must be cc, nc or nn"))?;
    let pair = PreorderPair::new(parse_preorder(n, first)?, parse_preorder(n, second)?)?;
    let member = membership(kind, &pair.first, &pair.second);
    let mut out = json!({ "kind": kind.name(), "member": member });
    if member {
        let f = reconstruct_frames(kind, &pair);
        let again = generate_pair(kind, &f.frame1, &f.frame2, &f.refinements1, &f.refinements2);
        out["frames"] = json!({
            "frame1": f.frame1, "frame2": f.frame2,
            "refinements1": f.refinements1, "refinements2": f.refinements2,
        });
        out["regenerated"] = json!(again.as_ref() == Ok(&pair));
    }
    if let Ok(m) = cc_matrix(&pair.first, &pair.second) {
        out["matrix"] = json!(m);
    }
    let orbit = canonical_form(&precut_core::Element::Pair(pair));
    out["canonical"] = orbit.to_json();
    print_json(&out)?;
    Ok(member)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Enum { inst, n, classes, filtrations, format } => {
            cmd_enum(inst, *n, *classes, *filtrations, *format)
        }
        Command::Verify { inst, check, nmax, delta, json } => cmd_verify(inst, *check, *nmax, *delta, *json),
        Command::Avoid { instance, preset, palette, nmax, check_irreducible } => {
            cmd_avoid(instance, preset, *palette, *nmax, *check_irreducible)
        }
        Command::Fock { inst, delta, mu, n, out, format, force, no_cache } => {
            cmd_fock(inst, *delta, *mu, *n, out.as_ref(), *format, *force, *no_cache)
        }
        Command::CheckSquare { file } => cmd_check_square(file),
        Command::Preorder { n, p, q } => cmd_preorder(*n, p, q.as_deref()),
        Command::Parking { n, chain } => cmd_parking(*n, chain),
        Command::Pairs { kind, n, first, second } => cmd_pairs(kind, *n, first, second),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
