use std::collections::BTreeSet;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use strandkit_core::arc::{enumerate_arcs, random_arc, GenBounds};
use strandkit_core::bush::BlockFamily;
use strandkit_core::intersect::ReportRow;
use strandkit_core::{
    build_arc_module, build_r, count_parts, examples, hom_dim, hom_rep_dim, verify_pairs, ArcData, ArcFile, BiQuiver,
    Datum, Field, LocalSystem, Sign, TaggedArc, WordClass,
};

/// Enumeration bound on crossings.
const MAX_CROSSINGS: usize = 8;

#[derive(Parser)]
#[command(name = "strandkit", version, about = "Arc objects, dg modules and intersection counts for graded skew-gentle algebras")]
struct Cli {
    /// Scalar field: `q` for the rationals or `p:PRIME`.
    #[arg(long, global = true, default_value = "q", value_parser = parse_field)]
    field: Field,
    /// Seed for random arc generation.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Cmd {
    /// Datum checks.
    #[command(subcommand)]
    Datum(DatumCmd),
    /// Arc file utilities.
    #[command(subcommand)]
    Arc(ArcCmd),
    /// Arc dg modules and their Hom spaces.
    #[command(subcommand)]
    Dg(DgCmd),
    /// Oriented intersection numbers.
    #[command(subcommand)]
    Int(IntCmd),
    /// Word representations of the bush category.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Built-in examples.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
    },
    /// Lists canonical arcs up to a crossing bound.
    Enumerate {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, default_value_t = 3)]
        max_crossings: usize,
        /// Bound on the index of the first crossing.
        #[arg(long, default_value_t = 1)]
        max_r: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    Running,
    D4,
}

#[derive(Args)]
struct DatumArg {
    /// Datum file, or `running` / `d4`.
    #[arg(long, default_value = "running")]
    datum: String,
}

#[derive(Args)]
struct Window {
    /// Inclusive shift window `a..b`.
    #[arg(long, default_value = "-8..8", allow_hyphen_values = true, value_parser = parse_window)]
    rho_window: RangeInclusive<i64>,
}

#[derive(Subcommand)]
enum DatumCmd {
    Validate { file: PathBuf },
    Quiver { file: PathBuf },
}

#[derive(Subcommand)]
enum ArcCmd {
    /// Canonical compact form.
    Canon {
        #[command(flatten)]
        datum: DatumArg,
        file: PathBuf,
    },
    Shift {
        #[command(flatten)]
        datum: DatumArg,
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        by: i64,
    },
    /// Full letters and taggings as an arc file.
    Encode {
        #[command(flatten)]
        datum: DatumArg,
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum DgCmd {
    Build {
        #[command(flatten)]
        datum: DatumArg,
        file: PathBuf,
    },
    Hom {
        #[command(flatten)]
        datum: DatumArg,
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        window: Window,
    },
}

#[derive(Subcommand)]
enum IntCmd {
    /// Intersection counts split by kind.
    Count {
        #[command(flatten)]
        datum: DatumArg,
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        window: Window,
    },
    /// Compares intersection numbers with Hom dimensions. Without arc files
    /// the running datum checks its two example arcs and other datums draw
    /// random pairs.
    Verify {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(num_args = 0..=2)]
        arcs: Vec<PathBuf>,
        /// Number of random pairs.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 6)]
        max_crossings: usize,
        #[arg(long, default_value_t = 2)]
        max_r: i64,
        #[command(flatten)]
        window: Window,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Builds the representation of a word and reports its shape.
    Build {
        #[command(flatten)]
        datum: DatumArg,
        file: PathBuf,
        /// `none`, `+`, `-`, `++`, `band:a1,..,ad` or `block:FAMILY:Q[:a1,..]`.
        #[arg(long, default_value = "none")]
        local: String,
        /// Read a compact word as periodic.
        #[arg(long)]
        periodic: bool,
    },
    /// Hom dimension between the representations of two arcs.
    Hom {
        #[command(flatten)]
        datum: DatumArg,
        a: PathBuf,
        b: PathBuf,
    },
}

fn parse_field(s: &str) -> Result<Field, String> {
    match s {
        "q" | "Q" => Ok(Field::Rational),
        _ => {
            let p = s.strip_prefix("p:").ok_or("expected `q` or `p:PRIME`")?;
            let p: u64 = p.parse().map_err(|_| format!("bad prime `{p}`"))?;
            Field::prime(p).map_err(|e| e.to_string())
        }
    }
}

fn parse_window(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s.split_once("..").ok_or("expected `a..b`")?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad bound `{a}`"))?;
    let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad bound `{b}`"))?;
    if a > b {
        return Err(format!("empty window {a}..{b}"));
    }
    Ok(a..=b)
}

fn parse_local(s: &str) -> anyhow::Result<LocalSystem> {
    let ints = |t: &str| -> anyhow::Result<Vec<i64>> {
        t.split(',').filter(|x| !x.is_empty()).map(|x| x.trim().parse().with_context(|| format!("bad integer `{x}`"))).collect()
    };
    Ok(match s {
        "none" => LocalSystem::None,
        "+" | "-" => LocalSystem::Sign(Sign::parse(s).unwrap()),
        "++" | "+-" | "-+" | "--" => LocalSystem::SignPair(Sign::parse(&s[..1]).unwrap(), Sign::parse(&s[1..]).unwrap()),
        _ => {
            if let Some(c) = s.strip_prefix("band:") {
                LocalSystem::Band(ints(c)?)
            } else if let Some(rest) = s.strip_prefix("block:") {
                let mut it = rest.splitn(3, ':');
                let family = it.next().unwrap_or_default().parse().context("bad block family")?;
                let q = it.next().unwrap_or("0").parse().context("bad block size")?;
                LocalSystem::Block(BlockFamily { family, q, poly: ints(it.next().unwrap_or(""))? })
            } else {
                bail!("unknown local system `{s}`")
            }
        }
    })
}

fn load_datum(arg: &DatumArg) -> anyhow::Result<Datum> {
    match arg.datum.as_str() {
        "running" => Ok(examples::running_datum()),
        "d4" => Ok(examples::d4_datum()),
        path => read_datum(Path::new(path)),
    }
}

fn read_datum(path: &Path) -> anyhow::Result<Datum> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Datum::from_json(&text).with_context(|| format!("datum {}", path.display()))
}

fn read_arc(d: &Datum, path: &Path) -> anyhow::Result<TaggedArc> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = ArcFile::parse(&text).with_context(|| format!("arc {}", path.display()))?;
    file.to_arc(d).with_context(|| format!("arc {}", path.display()))
}

/// Rows with named columns, rendered as JSON objects, CSV or an aligned table.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(headers: &[&'static str]) -> Table {
        Table { headers: headers.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Value>) {
        self.rows.push(row);
    }

    fn cell(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }

    fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.headers.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect()))
                    .collect();
                serde_json::to_string_pretty(&rows)? + "\n"
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(Table::cell))?;
                }
                String::from_utf8(w.into_inner()?)?
            }
            Format::Table => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Table::cell).collect()).collect();
                let mut width: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for r in &cells {
                    for (w, c) in width.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |r: Vec<String>| {
                    let padded: Vec<String> = r.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut out = line(self.headers.iter().map(|h| h.to_string()).collect());
                for r in cells {
                    out += &line(r);
                }
                out
            }
        })
    }
}

fn report_table(rows: &[ReportRow]) -> Table {
    let mut t = Table::new(&["arcA", "arcB", "rho", "int", "homdim", "match"]);
    for r in rows {
        t.push(vec![json!(r.arc_a), json!(r.arc_b), json!(r.rho), json!(r.int), json!(r.homdim), json!(r.matches)]);
    }
    t
}

fn arc_table(d: &Datum, arcs: &[TaggedArc]) -> Table {
    let mut t = Table::new(&["crossings", "arc", "tags"]);
    for a in arcs {
        let tags: String = a.tags().iter().map(|s| s.as_char()).collect();
        t.push(vec![json!(a.crossings(d)), json!(a.compact()), json!(tags)]);
    }
    t
}

fn dg_table(d: &Datum, a: &TaggedArc) -> anyhow::Result<(Value, Table)> {
    let dump = build_arc_module(d, a)?.dump(d);
    let mut t = Table::new(&["row", "col", "entry"]);
    for (r, c, e) in &dump.entries {
        t.push(vec![json!(r), json!(c), json!(e)]);
    }
    Ok((serde_json::to_value(&dump)?, t))
}

/// Sorts by crossing count, then by compact word.
fn sorted_arcs(d: &Datum, arcs: impl IntoIterator<Item = TaggedArc>) -> Vec<TaggedArc> {
    let mut v: Vec<(usize, String, TaggedArc)> = arcs.into_iter().map(|a| (a.crossings(d), a.compact(), a)).collect();
    v.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    v.dedup_by(|x, y| x.1 == y.1);
    v.into_iter().map(|x| x.2).collect()
}

/// Arc objects of a datum up to shift, with their endomorphism dimensions.
fn objects_up_to_shift(d: &Datum, max_crossings: usize, field: Field) -> anyhow::Result<Vec<(TaggedArc, usize)>> {
    let set: BTreeSet<TaggedArc> = enumerate_arcs(d, max_crossings, 1).iter().map(|a| a.shift_normal_form().0).collect();
    sorted_arcs(d, set)
        .into_iter()
        .map(|a| {
            let m = build_arc_module(d, &a)?;
            let end = hom_dim(d, &m, &m, 0, field);
            Ok((a, end))
        })
        .collect()
}

struct Out {
    format: Format,
    text: String,
    ok: bool,
}

impl Out {
    fn new(format: Format) -> Out {
        Out { format, text: String::new(), ok: true }
    }

    fn table(&mut self, t: &Table) -> anyhow::Result<()> {
        self.text += &t.render(self.format)?;
        Ok(())
    }

    /// Structured value for JSON, or a table otherwise.
    fn either(&mut self, v: Value, t: &Table) -> anyhow::Result<()> {
        if self.format == Format::Json {
            self.text += &(serde_json::to_string_pretty(&v)? + "\n");
            Ok(())
        } else {
            self.table(t)
        }
    }

    /// Section heading for the table format only.
    fn heading(&mut self, s: &str) {
        if self.format == Format::Table {
            self.text += &format!("== {s}\n");
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Out> {
    let mut out = Out::new(cli.format);
    let field = cli.field;
    match cli.cmd {
        Cmd::Datum(DatumCmd::Validate { file }) => {
            let d = read_datum(&file)?;
            let mut t = Table::new(&["polygons", "sides", "fixed", "classes"]);
            t.push(vec![
                json!(d.num_polygons()),
                json!(d.omega().count()),
                json!(d.fixed_points().len()),
                json!(d.num_classes()),
            ]);
            out.table(&t)?;
        }
        Cmd::Datum(DatumCmd::Quiver { file }) => {
            let q = read_datum(&file)?.quiver_triple();
            let mut t = Table::new(&["arrow", "source", "target", "degree"]);
            for (label, s, e, deg) in &q.arrows {
                t.push(vec![json!(label), json!(q.vertices[*s]), json!(q.vertices[*e]), json!(deg)]);
            }
            out.heading(&format!(
                "{} vertices, {} arrows, {} special loops, {} relations",
                q.vertices.len(),
                q.arrows.len(),
                q.special.len(),
                q.relations.len()
            ));
            out.either(serde_json::to_value(&q)?, &t)?;
        }
        Cmd::Arc(cmd) => {
            let (datum, file) = match &cmd {
                ArcCmd::Canon { datum, file } | ArcCmd::Shift { datum, file, .. } | ArcCmd::Encode { datum, file } => {
                    (datum, file)
                }
            };
            let d = load_datum(datum)?;
            let a = read_arc(&d, file)?;
            match cmd {
                ArcCmd::Canon { .. } => out.table(&arc_table(&d, &[a]))?,
                ArcCmd::Shift { by, .. } => out.table(&arc_table(&d, &[a.shift(by)]))?,
                ArcCmd::Encode { .. } => {
                    let f = ArcFile::from_arc(&d, &a);
                    out.text += &(serde_json::to_string_pretty(&f)? + "\n");
                }
            }
        }
        Cmd::Dg(DgCmd::Build { datum, file }) => {
            let d = load_datum(&datum)?;
            let a = read_arc(&d, &file)?;
            let (v, t) = dg_table(&d, &a)?;
            out.heading(&format!("summands {}", v["summands"]));
            out.either(v, &t)?;
        }
        Cmd::Dg(DgCmd::Hom { datum, a, b, window }) => {
            let d = load_datum(&datum)?;
            let (x, y) = (build_arc_module(&d, &read_arc(&d, &a)?)?, build_arc_module(&d, &read_arc(&d, &b)?)?);
            let mut t = Table::new(&["rho", "homdim"]);
            for rho in window.rho_window {
                t.push(vec![json!(rho), json!(hom_dim(&d, &x, &y, rho, field))]);
            }
            out.table(&t)?;
        }
        Cmd::Int(IntCmd::Count { datum, a, b, window }) => {
            let d = load_datum(&datum)?;
            let (x, y) = (read_arc(&d, &a)?, read_arc(&d, &b)?);
            let mut t = Table::new(&["rho", "int", "hlines", "cross", "wedge", "boundary"]);
            for rho in window.rho_window {
                let p = count_parts(&d, &x, &y.shift(rho))?;
                t.push(vec![json!(rho), json!(p.total()), json!(p.hlines), json!(p.w2_cross), json!(p.w2_wedge), json!(p.w1)]);
            }
            out.table(&t)?;
        }
        Cmd::Int(IntCmd::Verify { datum, arcs, random, max_crossings, max_r, window }) => {
            let d = load_datum(&datum)?;
            let pairs = match (arcs.len(), random) {
                (2, None) => vec![(read_arc(&d, &arcs[0])?, read_arc(&d, &arcs[1])?)],
                (0, None) if datum.datum == "running" => vec![(examples::sigma(&d), examples::tau(&d))],
                (0, n) => {
                    if max_crossings > MAX_CROSSINGS {
                        bail!("crossing bound {max_crossings} exceeds the cap {MAX_CROSSINGS}");
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let b = GenBounds { max_crossings, max_r };
                    (0..n.unwrap_or(100)).map(|_| (random_arc(&d, &mut rng, b), random_arc(&d, &mut rng, b))).collect()
                }
                _ => bail!("give two arc files, or none with --random N"),
            };
            let rows = verify_pairs(&d, &pairs, window.rho_window, field)?;
            out.ok = rows.iter().all(|r| r.matches);
            out.table(&report_table(&rows))?;
            if !out.ok {
                let bad = rows.iter().filter(|r| !r.matches).count();
                eprintln!("{bad} of {} rows mismatch", rows.len());
            }
        }
        Cmd::Rep(RepCmd::Build { datum, file, local, periodic }) => {
            let d = load_datum(&datum)?;
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let mut f = ArcFile::parse(&text)?;
            f.periodic |= periodic;
            let w = f.word()?.canonicalize(&d);
            let r = build_r(&d, &w, &parse_local(&local)?)?;
            let class = match w.classify(&d) {
                WordClass::Extensible => "extensible",
                WordClass::Afw => "asymmetric finite",
                WordClass::Sfw => "symmetric finite",
                WordClass::Apw => "asymmetric periodic",
                WordClass::Spw => "symmetric periodic",
            };
            let mut t = Table::new(&["word", "class", "objects", "dimension", "bijective", "end"]);
            t.push(vec![
                json!(w.compact()),
                json!(class),
                json!(r.objects.len()),
                json!(r.objects.iter().map(|o| o.dim).sum::<usize>()),
                json!(r.is_bijective()),
                json!(hom_rep_dim(&d, &r, &r, field)),
            ]);
            out.table(&t)?;
        }
        Cmd::Rep(RepCmd::Hom { datum, a, b }) => {
            let d = load_datum(&datum)?;
            let (x, y) = (read_arc(&d, &a)?, read_arc(&d, &b)?);
            let dim = hom_rep_dim(&d, &strandkit_core::rep_of_arc(&d, &x), &strandkit_core::rep_of_arc(&d, &y), field);
            let mut t = Table::new(&["homdim", "hlines"]);
            t.push(vec![json!(dim), json!(count_parts(&d, &x, &y)?.hlines)]);
            out.table(&t)?;
        }
        Cmd::Example { name: ExampleName::Running } => example_running(&mut out, field)?,
        Cmd::Example { name: ExampleName::D4 } => {
            let d = examples::d4_datum();
            let objects = objects_up_to_shift(&d, MAX_CROSSINGS, field)?;
            let mut t = Table::new(&["crossings", "arc", "end"]);
            for (a, end) in &objects {
                t.push(vec![json!(a.crossings(&d)), json!(a.compact()), json!(end)]);
            }
            out.heading(&format!("datum {}", d.to_json()));
            out.heading(&format!("arc objects up to shift: {}", objects.len()));
            out.table(&t)?;
        }
        Cmd::Enumerate { datum, max_crossings, max_r } => {
            if max_crossings > MAX_CROSSINGS {
                bail!("crossing bound {max_crossings} exceeds the cap {MAX_CROSSINGS}");
            }
            let d = load_datum(&datum)?;
            let arcs = sorted_arcs(&d, enumerate_arcs(&d, max_crossings, max_r));
            out.table(&arc_table(&d, &arcs))?;
        }
    }
    Ok(out)
}

fn example_running(out: &mut Out, field: Field) -> anyhow::Result<()> {
    let d = examples::running_datum();
    let (s, t) = (examples::sigma(&d), examples::tau(&d));
    let (a, b) = (ArcData::new(&d, &s)?, ArcData::new(&d, &t)?);
    let q = BiQuiver::build(&d, &a, &b);
    let lines = q.lines(&a, &b);
    let rows = verify_pairs(&d, &[(s.clone(), t.clone())], -8..=8, field)?;
    out.ok = rows.iter().all(|r| r.matches);
    if out.format == Format::Json {
        let v = json!({
            "datum": serde_json::from_str::<Value>(&d.to_json())?,
            "sigma": s.compact(),
            "tau": t.compact(),
            "dg_sigma": a.module.dump(&d),
            "dg_tau": b.module.dump(&d),
            "biquiver": { "vertices": q.vertices.len(), "lines": lines.len(), "tagged_h_lines": lines.iter().filter(|l| l.tagged_h).count() },
            "table": rows,
        });
        out.text += &(serde_json::to_string_pretty(&v)? + "\n");
        return Ok(());
    }
    out.heading(&format!("datum {}", d.to_json()));
    out.heading(&format!("sigma {}", s.compact()));
    out.heading(&format!("tau {}", t.compact()));
    for (name, x) in [("sigma", &s), ("tau", &t)] {
        let (v, tab) = dg_table(&d, x)?;
        out.heading(&format!("dg {name}: summands {}", v["summands"]));
        out.table(&tab)?;
    }
    out.heading(&format!(
        "bi-quiver: {} vertices, {} lines, {} tagged h-lines",
        q.vertices.len(),
        lines.len(),
        lines.iter().filter(|l| l.tagged_h).count()
    ));
    out.heading("int and hom");
    let mut tab = Table::new(&["rho", "int", "homdim", "match"]);
    for r in &rows {
        tab.push(vec![json!(r.rho), json!(r.int), json!(r.homdim), json!(r.matches)]);
    }
    out.table(&tab)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {:#}", anyhow!(e));
            ExitCode::from(2)
        }
    }
}
