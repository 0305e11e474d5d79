//! Command-line front end. `run` is the whole program minus process exit, so
//! it can be driven from tests with in-memory streams.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::dominance::{
    certify_definiteness, CertificationReport, ClassVerdict, Conclusion, DominanceChecker,
    DominanceClass, PartitionChoice, DEFAULT_SEARCH_CAP,
};
use crate::eig::{newton_eigenpairs, NewtonOptions};
use crate::io::{parse_tensor_file, write_raster, RasterFormat};
use crate::regions::{
    default_window, rasterize, verify_inclusion_chain, RegionKind, RegionSpec, Regions, Window,
    DEFAULT_MARGIN,
};
use crate::tensor::{PartitionRadii, RadiiCache, SubsetPartition, Tensor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_CANT_CREATE: i32 = 73;

/// Relative inflation applied to region tests of numerically computed
/// eigenvalues.
const EIG_MEMBERSHIP_SLACK: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "tenloc", version, about = "Tensor eigenvalue localization and definiteness certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Gamma,
    Brauer,
    Sbrauer,
    Omega,
}

impl From<KindArg> for RegionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gamma => RegionKind::Gamma,
            KindArg::Brauer => RegionKind::Brauer,
            KindArg::Sbrauer => RegionKind::SBrauer,
            KindArg::Omega => RegionKind::OmegaS,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Pgm,
    Csv,
    Svg,
}

impl From<FormatArg> for RasterFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Pgm => RasterFormat::Pgm,
            FormatArg::Csv => RasterFormat::Csv,
            FormatArg::Svg => RasterFormat::Svg,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print r_i, r_i^j and, with --subset, the split radii.
    Radii {
        file: PathBuf,
        #[arg(long)]
        subset: Option<String>,
    },
    /// Rasterize a localization set over a window.
    Region {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        subset: Option<String>,
        /// re_min,re_max,im_min,im_max
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// WIDTHxHEIGHT in cells
        #[arg(long, default_value = "256x256")]
        res: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "pgm")]
        format: FormatArg,
    },
    /// Evaluate every dominance class.
    Classify {
        file: PathBuf,
        /// Comma-separated 1-based indices, or "search"
        #[arg(long)]
        subset: Option<String>,
    },
    /// Try to certify positive (semi-)definiteness. Exit 0 when certified, 2 otherwise.
    Certify {
        file: PathBuf,
        /// Comma-separated 1-based indices, or "search"
        #[arg(long)]
        subset: Option<String>,
    },
    /// Compute eigenpairs numerically and check region membership.
    Eig {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Subset used for the S-type regions (default: 1)
        #[arg(long)]
        subset: Option<String>,
    },
    /// Sample points and check the region inclusion chain. Exit 0 iff no violations.
    VerifyChain {
        file: PathBuf,
        #[arg(long)]
        subset: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Input(String),
    Output(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_DATA,
            CliError::Input(_) => EXIT_NO_INPUT,
            CliError::Output(_) => EXIT_CANT_CREATE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Input(m) | CliError::Output(m) => m,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code.
pub fn run<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };

    let mut text = String::new();
    let result = dispatch(cli.command, &mut text);
    if out.write_all(text.as_bytes()).is_err() {
        return EXIT_CANT_CREATE;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut String) -> CliResult<i32> {
    match cmd {
        Command::Radii { file, subset } => {
            let t = load(&file)?;
            let part = subset.map(|s| parse_subset(&s, t.dim())).transpose()?;
            report_radii(&t, part.as_ref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Region {
            file,
            kind,
            subset,
            window,
            res,
            out: path,
            format,
        } => {
            let t = load(&file)?;
            let kind = RegionKind::from(kind);
            let part = subset.map(|s| parse_subset(&s, t.dim())).transpose()?;
            let spec = RegionSpec::new(kind, part)?;
            let window = match window {
                Some(w) => parse_window(&w)?,
                None => default_window(&t, DEFAULT_MARGIN),
            };
            let (cols, rows) = parse_resolution(&res)?;
            let g = rasterize(&t, &spec, &window, cols, rows)?;
            std::fs::write(&path, write_raster(&g, format.into()))
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            writeln!(
                out,
                "{} raster {}x{} over [{}, {}] x [{}, {}]: {} of {} cells inside, written to {}",
                kind.name(),
                cols,
                rows,
                f4(window.re_min),
                f4(window.re_max),
                f4(window.im_min),
                f4(window.im_max),
                g.count(),
                cols * rows,
                path.display()
            )
            .unwrap();
            Ok(EXIT_OK)
        }
        Command::Classify { file, subset } => {
            let t = load(&file)?;
            let choice = parse_choice(subset.as_deref(), t.dim())?;
            report_classes(&t, &choice, out)?;
            Ok(EXIT_OK)
        }
        Command::Certify { file, subset } => {
            let t = load(&file)?;
            let choice = parse_choice(subset.as_deref(), t.dim())?;
            let report = certify_definiteness(&t, &choice);
            write_report(&report, out);
            Ok(match report.conclusion {
                Conclusion::Inconclusive => EXIT_INCONCLUSIVE,
                _ if report.certificate().is_some() => EXIT_OK,
                _ => EXIT_INCONCLUSIVE,
            })
        }
        Command::Eig {
            file,
            starts,
            seed,
            tol,
            subset,
        } => {
            let t = load(&file)?;
            if !(tol > 0.0) {
                return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
            }
            let part = match subset {
                Some(s) => Some(parse_subset(&s, t.dim())?),
                None if t.dim() >= 2 => Some(SubsetPartition::new(vec![0], t.dim())?),
                None => None,
            };
            report_eigenpairs(
                &t,
                &NewtonOptions {
                    num_starts: starts,
                    seed,
                    tol,
                    ..Default::default()
                },
                part.as_ref(),
                out,
            )?;
            Ok(EXIT_OK)
        }
        Command::VerifyChain {
            file,
            subset,
            samples,
            seed,
        } => {
            let t = load(&file)?;
            let part = parse_subset(&subset, t.dim())?;
            let report = verify_inclusion_chain(&t, &part, samples, seed)?;
            writeln!(
                out,
                "S = {part}: {} points checked, {} violations",
                report.points,
                report.violations.len()
            )
            .unwrap();
            for v in report.violations.iter().take(20) {
                writeln!(out, "  {:?} at {}", v.link, fz(v.z)).unwrap();
            }
            Ok(if report.violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            })
        }
    }
}

fn load(path: &Path) -> CliResult<Tensor> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_tensor_file(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Parses a comma-separated list of 1-based indices.
pub fn parse_subset(spec: &str, dim: usize) -> crate::Result<SubsetPartition> {
    let mut idx = Vec::new();
    for part in spec.split(',') {
        let k: usize = part.trim().parse().map_err(|_| {
            crate::Error::InvalidPartition(format!("'{}' is not an index", part.trim()))
        })?;
        if k == 0 {
            return Err(crate::Error::InvalidPartition("indices are 1-based".into()));
        }
        idx.push(k - 1);
    }
    SubsetPartition::new(idx, dim)
}

fn parse_choice(spec: Option<&str>, dim: usize) -> CliResult<PartitionChoice> {
    match spec {
        None | Some("search") => Ok(PartitionChoice::Search),
        Some(s) => Ok(PartitionChoice::Explicit(vec![parse_subset(s, dim)?])),
    }
}

fn parse_window(spec: &str) -> CliResult<Window> {
    let vals: Vec<f64> = spec
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad window '{spec}'")))?;
    match vals[..] {
        [a, b, c, d] => Ok(Window::new(a, b, c, d)?),
        _ => Err(CliError::Config(format!(
            "window needs re_min,re_max,im_min,im_max, got '{spec}'"
        ))),
    }
}

fn parse_resolution(spec: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Config(format!("bad resolution '{spec}', expected WIDTHxHEIGHT"));
    let (w, h) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
    let cols: usize = w.trim().parse().map_err(|_| bad())?;
    let rows: usize = h.trim().parse().map_err(|_| bad())?;
    if cols == 0 || rows == 0 {
        return Err(bad());
    }
    Ok((cols, rows))
}

/// Four-decimal formatting used in all human-readable reports.
fn f4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn fz(z: Complex64) -> String {
    if z.im == 0.0 {
        f4(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", f4(z.re), f4(-z.im))
    } else {
        format!("{}+{}i", f4(z.re), f4(z.im))
    }
}

fn report_radii(t: &Tensor, part: Option<&SubsetPartition>, out: &mut String) -> CliResult<()> {
    let cache = RadiiCache::new(t);
    let n = t.dim();
    writeln!(out, "order {}, dimension {}", t.order(), n).unwrap();
    writeln!(out, "{:>4} {:>16} {:>12}", "i", "a_i..i", "r_i").unwrap();
    for i in 0..n {
        writeln!(out, "{:>4} {:>16} {:>12}", i + 1, fz(cache.diag[i]), f4(cache.row[i])).unwrap();
    }
    if n >= 2 {
        writeln!(out, "\ndeleted radii r_i^j (row i, column j)").unwrap();
        write!(out, "{:>4}", "i\\j").unwrap();
        for j in 0..n {
            write!(out, " {:>10}", j + 1).unwrap();
        }
        out.push('\n');
        for i in 0..n {
            write!(out, "{:>4}", i + 1).unwrap();
            for j in 0..n {
                if i == j {
                    write!(out, " {:>10}", "-").unwrap();
                } else {
                    write!(out, " {:>10}", f4(cache.deleted(i, j))).unwrap();
                }
            }
            out.push('\n');
        }
    }
    if let Some(part) = part {
        let split = PartitionRadii::new(t, part)?;
        writeln!(
            out,
            "\nsplit radii for S = {part}, complement S' = {}",
            SubsetPartition::new(part.complement().to_vec(), n)?
        )
        .unwrap();
        writeln!(
            out,
            "{:>4} {:>12} {:>12} {:>12} {:>12}",
            "i", "in(S)", "out(S)", "in(S')", "out(S')"
        )
        .unwrap();
        for i in 0..n {
            writeln!(
                out,
                "{:>4} {:>12} {:>12} {:>12} {:>12}",
                i + 1,
                f4(split.in_subset[i]),
                f4(split.out_subset[i]),
                f4(split.in_complement[i]),
                f4(split.out_complement[i])
            )
            .unwrap();
        }
    }
    Ok(())
}

fn verdict_line(v: &ClassVerdict) -> String {
    let subset = v
        .partition
        .as_ref()
        .map(|p| format!(" S = {p}"))
        .unwrap_or_default();
    match &v.witness {
        None => format!("{:<9}{subset}: holds", v.class.name()),
        Some(w) => format!(
            "{:<9}{subset}: fails, {}: {} {} {}",
            v.class.name(),
            w.inequality,
            f4(w.lhs),
            if v.class.is_strict() { "<=" } else { "<" },
            f4(w.rhs)
        ),
    }
}

fn report_classes(t: &Tensor, choice: &PartitionChoice, out: &mut String) -> CliResult<()> {
    let checker = DominanceChecker::new(t);
    for strict in [false, true] {
        for class in DominanceClass::ladder(strict) {
            if class.needs_pairs() && t.dim() < 2 {
                writeln!(out, "{:<9}: needs dimension >= 2", class.name()).unwrap();
                continue;
            }
            if !class.needs_partition() {
                writeln!(out, "{}", verdict_line(&checker.check(class, None)?)).unwrap();
                continue;
            }
            match choice {
                PartitionChoice::Explicit(parts) => {
                    for p in parts {
                        writeln!(out, "{}", verdict_line(&checker.check(class, Some(p))?)).unwrap();
                    }
                }
                PartitionChoice::Search => match checker.find_subset(class, DEFAULT_SEARCH_CAP)? {
                    Some(p) => {
                        writeln!(out, "{}", verdict_line(&checker.check(class, Some(&p))?)).unwrap()
                    }
                    None => writeln!(out, "{:<9}: no subset S works", class.name()).unwrap(),
                },
            }
        }
    }
    Ok(())
}

fn write_report(r: &CertificationReport, out: &mut String) {
    writeln!(out, "symmetric:      {}", r.symmetric).unwrap();
    writeln!(out, "even order:     {}", r.even_order).unwrap();
    writeln!(out, "real entries:   {}", r.real).unwrap();
    writeln!(out, "diagonal sign:  {}", r.diagonal_sign).unwrap();
    writeln!(out, "verdicts:").unwrap();
    for v in &r.verdicts {
        writeln!(out, "  {}", verdict_line(v)).unwrap();
    }
    writeln!(out, "conclusion:     {}", r.conclusion).unwrap();
    if let Some(class) = r.certified_by {
        write!(out, "certified by:   {class}").unwrap();
        if let Some(p) = &r.certifying_partition {
            write!(out, " with S = {p}").unwrap();
        }
        out.push('\n');
    }
    for reason in &r.reasons {
        writeln!(out, "note:           {reason}").unwrap();
    }
}

fn report_eigenpairs(
    t: &Tensor,
    opts: &NewtonOptions,
    part: Option<&SubsetPartition>,
    out: &mut String,
) -> CliResult<()> {
    let pairs = newton_eigenpairs(t, opts);
    let regions = match part {
        Some(p) => Regions::with_partition(t, p)?,
        None => Regions::new(t),
    };
    let kinds: Vec<RegionKind> = RegionKind::ALL
        .into_iter()
        .filter(|k| (t.dim() >= 2 || *k == RegionKind::Gamma) && (part.is_some() || !k.needs_partition()))
        .collect();
    writeln!(
        out,
        "{} eigenvalues from {} starts (seed {}){}",
        pairs.len(),
        opts.num_starts,
        opts.seed,
        part.map(|p| format!(", S = {p}")).unwrap_or_default()
    )
    .unwrap();
    write!(out, "{:>4} {:>12} {:>12} {:>10}", "#", "re", "im", "residual").unwrap();
    for k in &kinds {
        write!(out, " {:>8}", k.name()).unwrap();
    }
    out.push('\n');
    for (n, p) in pairs.iter().enumerate() {
        write!(
            out,
            "{:>4} {:>12} {:>12} {:>10.2e}",
            n + 1,
            f4(p.lambda.re),
            f4(p.lambda.im),
            p.residual
        )
        .unwrap();
        for &k in &kinds {
            let inside = regions.contains(k, p.lambda, EIG_MEMBERSHIP_SLACK)?;
            write!(out, " {:>8}", if inside { "yes" } else { "NO" }).unwrap();
        }
        out.push('\n');
    }
    Ok(())
}
