//! `loopkit`: check, report, isotope, construct, search and structure
//! commands over loop table files.
//!
//! Exit status is 0 when the checked property holds (or the command simply
//! succeeded), 1 when it fails, and 2 on usage or input errors. `check --all`
//! is a listing and always exits 0.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};

use loopkit::identity::{property_report, CheckResult};
use loopkit::io::{
    build_construction, format_witness, load_table, parse_search_spec, read_text, ConstructionKind,
    ReportDocument, TableFile,
};
use loopkit::isotopy::{isotope_classes, raw_isotope, IsotopeSpec, Side};
use loopkit::property::Property;
use loopkit::search::search_loops;
use loopkit::structure::{are_isomorphic, is_diassociative, normal_subloops, nuclei, stepping_up_check};
use loopkit::table::Element;

#[derive(Parser)]
#[command(name = "loopkit", version, about = "Finite loops as Cayley tables")]
struct Cli {
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one property, or every catalog identity with --all.
    Check(CheckArgs),
    /// Full property report.
    Report {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Include the wall-clock time spent.
        #[arg(long)]
        timing: bool,
    },
    /// Print a principal isotope, or classify all of them.
    Isotope(IsotopeArgs),
    /// Build a loop from a construction config and print it.
    Construct {
        /// central-ext, wedge or middle-bol
        kind: ConstructionKind,
        config: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a model search described by a spec file.
    Search {
        spec: PathBuf,
        /// Write each model to DIR/model-NNN.loop instead of stdout.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Exit 1 unless exactly this many models are found.
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Structural queries.
    Structure(StructureArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("what").args(["identity", "all"])))]
#[command(group(ArgGroup::new("quantifier").args(["universal", "semi"])))]
struct CheckArgs {
    file: PathBuf,
    /// Catalog name, inline identity (`x*y = y*x`) or named property.
    #[arg(long)]
    identity: Option<String>,
    #[arg(long)]
    all: bool,
    /// Check the identity in every principal isotope.
    #[arg(long, requires = "identity")]
    universal: bool,
    /// Check the identity in every left or right isotope.
    #[arg(long, value_name = "left|right", requires = "identity")]
    semi: Option<String>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["a", "classes"])))]
struct IsotopeArgs {
    file: PathBuf,
    /// Symbol `a` in x o y = (x / a)(b \ y).
    #[arg(long, requires = "b")]
    a: Option<usize>,
    #[arg(long, requires = "a")]
    b: Option<usize>,
    /// Partition all principal isotopes into isomorphism classes.
    #[arg(long)]
    classes: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("query").required(true).args(["nuclei", "normal", "diassoc", "stepping_up", "isomorphic"])))]
struct StructureArgs {
    file: PathBuf,
    #[arg(long)]
    nuclei: bool,
    /// List the normal subloops.
    #[arg(long)]
    normal: bool,
    #[arg(long)]
    diassoc: bool,
    #[arg(long)]
    stepping_up: bool,
    /// Test isomorphism with another table file.
    #[arg(long, value_name = "FILE2")]
    isomorphic: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Holds,
    Fails,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Fails) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Verdict> {
    match command {
        Command::Check(args) => check(args),
        Command::Report { file, json, timing } => {
            let f = load_table(&file)?;
            let doc = ReportDocument::build(&f, timing);
            out(&if json { doc.to_json() + "\n" } else { doc.to_text() })?;
            Ok(Verdict::Holds)
        }
        Command::Isotope(args) => isotope(args),
        Command::Construct { kind, config, output } => {
            let text = read_text(&config)?;
            let dir = config.parent().unwrap_or(Path::new("."));
            let built = build_construction(kind, &text, dir)?;
            emit(&built.to_text(), output.as_deref())?;
            Ok(Verdict::Holds)
        }
        Command::Search {
            spec,
            output_dir,
            expect,
        } => search(&spec, output_dir.as_deref(), expect),
        Command::Structure(args) => structure(args),
    }
}

/// Writes to stdout; a closed pipe (as in `| head`) is not an error.
fn out(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => out(text),
    }
}

fn print_verdict(f: &TableFile, name: &str, r: &CheckResult) -> Verdict {
    if r.holds {
        println!("{name} holds");
        return Verdict::Holds;
    }
    let mut line = format!("{name} fails");
    let w = f.witness_symbols(r);
    if !w.is_empty() {
        line.push_str(": ");
        line.push_str(&format_witness(&w));
    }
    if let Some(d) = &r.detail {
        line.push_str(&format!(" ({d})"));
    }
    println!("{line}");
    Verdict::Fails
}

fn check(args: CheckArgs) -> Result<Verdict> {
    let f = load_table(&args.file)?;
    let Some(identity) = args.identity else {
        // a listing: the exit status does not depend on the verdicts
        for (name, r) in &property_report(&f.table).entries {
            print_verdict(&f, name, r);
        }
        return Ok(Verdict::Holds);
    };
    let text = match (args.universal, args.semi.as_deref()) {
        (true, _) => format!("UF({identity})"),
        (false, Some(side)) => match side.parse::<Side>() {
            Ok(Side::Left) => format!("left-SUF({identity})"),
            Ok(Side::Right) => format!("right-SUF({identity})"),
            _ => bail!("--semi takes left or right, got {side:?}"),
        },
        (false, None) => identity,
    };
    let property: Property = text.parse()?;
    let r = property.check(&f.table)?;
    Ok(print_verdict(&f, &property.to_string(), &r))
}

fn element(f: &TableFile, symbol: usize) -> Result<Element> {
    f.element(symbol)
        .ok_or_else(|| anyhow!("symbol {symbol} is not in the table (symbols start at {})", f.base))
}

fn isotope(args: IsotopeArgs) -> Result<Verdict> {
    let f = load_table(&args.file)?;
    if args.classes {
        let classes = isotope_classes(&f.table, false)?;
        println!("{} isotope classes", classes.len());
        for (i, c) in classes.iter().enumerate() {
            let s = c.members[0];
            println!(
                "class {}: {} isotopes, e.g. a={} b={}",
                i + 1,
                c.multiplicity,
                f.symbol(s.a),
                f.symbol(s.b)
            );
        }
        return Ok(Verdict::Holds);
    }
    let (a, b) = (args.a.expect("clap group"), args.b.expect("clap requires"));
    let spec = IsotopeSpec::new(element(&f, a)?, element(&f, b)?);
    let iso = TableFile {
        name: Some(format!("isotope-a{a}-b{b}")),
        base: f.base,
        table: raw_isotope(&f.table, spec),
    };
    println!("# x o y = (x / {a})({b} \\ y), identity {}", iso.symbol(iso.table.identity()));
    out(&iso.to_text())?;
    Ok(Verdict::Holds)
}

fn search(spec_path: &Path, output_dir: Option<&Path>, expect: Option<usize>) -> Result<Verdict> {
    let spec = parse_search_spec(&read_text(spec_path)?)?;
    let outcome = search_loops(&spec)?;
    if let Some(dir) = output_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for (i, model) in outcome.models.iter().enumerate() {
        let name = format!("model-{:03}", i + 1);
        let file = TableFile::new(model.clone()).named(name.clone());
        match output_dir {
            Some(dir) => emit(&file.to_text(), Some(&dir.join(format!("{name}.loop"))))?,
            None => out(&file.to_text())?,
        }
    }
    let summary = serde_json::json!({
        "models": outcome.models.len(),
        "exhausted": outcome.exhausted,
        "nodes": outcome.nodes,
        "candidates": outcome.candidates,
    });
    println!("{summary}");
    if !outcome.exhausted {
        eprintln!("budget spent before the search space was exhausted; the model list is partial");
        return Ok(Verdict::Fails);
    }
    Ok(match expect {
        Some(n) if n != outcome.models.len() => {
            eprintln!("expected {n} models, found {}", outcome.models.len());
            Verdict::Fails
        }
        _ => Verdict::Holds,
    })
}

fn symbols(f: &TableFile, elems: &[Element]) -> String {
    let s: Vec<String> = elems.iter().map(|&e| f.symbol(e).to_string()).collect();
    format!("{{{}}}", s.join(", "))
}

fn structure(args: StructureArgs) -> Result<Verdict> {
    let f = load_table(&args.file)?;
    let l = &f.table;
    if args.nuclei {
        let n = nuclei(l);
        println!("left nucleus   {}", symbols(&f, &n.left));
        println!("middle nucleus {}", symbols(&f, &n.middle));
        println!("right nucleus  {}", symbols(&f, &n.right));
        println!("nucleus        {}", symbols(&f, &n.nucleus));
        println!("center         {}", symbols(&f, &n.center));
    } else if args.normal {
        for n in normal_subloops(l) {
            println!("{}", symbols(&f, &n));
        }
    } else if args.diassoc {
        return Ok(print_verdict(&f, "DIASSOC", &is_diassociative(l)));
    } else if args.stepping_up {
        return Ok(print_verdict(&f, "STEPPING-UP", &stepping_up_check(l)));
    } else if let Some(other) = args.isomorphic {
        let g = load_table(&other)?;
        return Ok(match are_isomorphic(l, &g.table) {
            Some(map) => {
                let pairs: Vec<String> = map
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| format!("{}->{}", f.symbol(x), g.symbol(y)))
                    .collect();
                println!("isomorphic: {}", pairs.join(" "));
                Verdict::Holds
            }
            None => {
                println!("not isomorphic");
                Verdict::Fails
            }
        });
    }
    Ok(Verdict::Holds)
}
