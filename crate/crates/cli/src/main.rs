//! Command-line front end for the fiber tables and pairings.
//!
//! Every subcommand renders to text or JSON (`--format`), optionally into a
//! file (`--out`). Exit codes: 0 on success, 2 on bad arguments, 3 when a
//! cross-checked identity fails to hold.

use clap::{Parser, Subcommand, ValueEnum};
use imfiber::{
    abel_check, abel_witness, component_number, cusps, duality_check, m_fraction,
    m_fraction_closed, quotient_component_numbers, r_fraction, r_fraction_closed,
    root_of_unity_number, weil_cross_check, weil_definitional, weil_formula, z_matrix,
    AbelError, Divisor, FiberKind, FiberShape, TorsionLabel,
};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "imfiber",
    version,
    about = "Tables and pairings for degenerate elliptic fibers, in exact arithmetic"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone)]
struct LabelArg {
    t: i64,
    s: i64,
}

impl FromStr for LabelArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| String::from("expected two integers as t,s"))?;
        let t = a.trim().parse().map_err(|_| format!("bad integer {a:?}"))?;
        let s = b.trim().parse().map_err(|_| format!("bad integer {b:?}"))?;
        Ok(LabelArg { t, s })
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the cusps with weights and the section's component and
    /// root-of-unity classes.
    Cusps {
        /// Torsion order (an odd prime, at least 5).
        #[arg(long)]
        p: u64,
        /// Section index in 1..p.
        #[arg(long, default_value_t = 1)]
        alpha: u64,
    },
    /// Component and root-of-unity fractions, enumerated and in closed form.
    Equidist {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        alpha: u64,
    },
    /// The class table Z[i][j] = class of i/j.
    Zmatrix {
        #[arg(long)]
        p: u64,
    },
    /// Duality across the base involution, the quotient component table,
    /// and the two-route inverse cross-check.
    Involution {
        #[arg(long)]
        p: u64,
    },
    /// Pair two torsion points, by definition and by the closed form.
    Weil {
        /// Torsion order.
        #[arg(long)]
        m: u64,
        /// Component count divided by the torsion order.
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// First point as t,s meaning (zeta_m^t, C_{sk}).
        #[arg(long)]
        p1: LabelArg,
        /// Second point as t,s.
        #[arg(long)]
        p2: LabelArg,
    },
    /// Test a divisor (JSON file) for principality and print a witness.
    Abel {
        /// Path to the divisor, as {"m": .., "points": [{"component", "coord", "mult"}]}.
        #[arg(long)]
        divisor: PathBuf,
        /// Expected component count, checked against the file when given.
        #[arg(long)]
        m: Option<u64>,
    },
}

enum CliError {
    Usage(String),
    Io(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Rendered output plus whether every cross-checked identity held.
struct Rendered {
    body: String,
    ok: bool,
}

fn main() -> ExitCode {
    if let Ok(cap) = std::env::var("TORSION_MAX_ORDER") {
        match cap.parse::<u64>() {
            Ok(v) if v >= 1 => imfiber::cyclotomic::set_max_order(v),
            _ => {
                eprintln!("error: TORSION_MAX_ORDER must be a positive integer, got {cap:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let rendered = match run(&cli) {
        Ok(r) => r,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered.body.as_bytes()) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", rendered.body),
    }
    if rendered.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: a cross-checked identity failed; see the output");
        ExitCode::from(3)
    }
}

fn run(cli: &Cli) -> Result<Rendered, CliError> {
    match &cli.command {
        Command::Cusps { p, alpha } => render_cusps(*p, *alpha, cli.format),
        Command::Equidist { p, alpha } => render_equidist(*p, *alpha, cli.format),
        Command::Zmatrix { p } => render_zmatrix(*p, cli.format),
        Command::Involution { p } => render_involution(*p, cli.format),
        Command::Weil { m, k, p1, p2 } => render_weil(*m, *k, p1, p2, cli.format),
        Command::Abel { divisor, m } => render_abel(divisor, *m, cli.format),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON rendering cannot fail");
    s.push('\n');
    s
}

fn render_cusps(p: u64, alpha: u64, format: Format) -> Result<Rendered, CliError> {
    if alpha == 0 || alpha % p == 0 {
        return Err(CliError::Usage(format!(
            "the section index must be nonzero mod {p}"
        )));
    }
    let table = cusps(p)?;
    let mut rows = Vec::new();
    for cusp in &table {
        let (k, ell) = match cusp.kind() {
            FiberKind::I1 => (
                None,
                Some(root_of_unity_number(p, alpha, cusp.index())?),
            ),
            FiberKind::Ip => (component_number(p, alpha, cusp.index())?, None),
        };
        rows.push((cusp, k, ell));
    }
    let total: u64 = table.iter().map(|c| c.weight()).sum();
    match format {
        Format::Json => {
            let cusps_json: Vec<Value> = rows
                .iter()
                .map(|(c, k, ell)| {
                    json!({
                        "rep": c.rep(),
                        "type": match c.kind() { FiberKind::I1 => "I1", FiberKind::Ip => "Ip" },
                        "index": c.index(),
                        "weight": c.weight(),
                        "k": k.map(|g| g.rep()).unwrap_or(0),
                        "ell": ell.map(|g| g.rep()),
                    })
                })
                .collect();
            Ok(Rendered {
                body: pretty(&json!({
                    "p": p,
                    "alpha": alpha,
                    "cusps": cusps_json,
                    "total_weight": total,
                })),
                ok: true,
            })
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "p = {p}, section index {alpha}").unwrap();
            writeln!(out, "{:<8}{:<6}{:<8}{:<4}ell", "cusp", "type", "weight", "k").unwrap();
            for (c, k, ell) in &rows {
                writeln!(
                    out,
                    "{:<8}{:<6}{:<8}{:<4}{}",
                    c.rep(),
                    c.kind().to_string(),
                    c.weight(),
                    k.map(|g| g.rep()).unwrap_or(0),
                    ell.map(|g| g.rep().to_string()).unwrap_or_else(|| String::from("-")),
                )
                .unwrap();
            }
            writeln!(out, "total weight: {total}").unwrap();
            Ok(Rendered { body: out, ok: true })
        }
    }
}

fn render_equidist(p: u64, alpha: u64, format: Format) -> Result<Rendered, CliError> {
    if alpha == 0 || alpha % p == 0 {
        return Err(CliError::Usage(format!(
            "the section index must be nonzero mod {p}"
        )));
    }
    let h = (p - 1) / 2;
    let mut all_match = true;
    let mut m_rows = Vec::new();
    for i in 0..=h {
        let counted = m_fraction(p, alpha, i)?;
        let closed = m_fraction_closed(p, i)?;
        all_match &= counted == closed;
        m_rows.push((i, counted, closed));
    }
    let mut r_rows = Vec::new();
    for i in 1..=h {
        let counted = r_fraction(p, alpha, i)?;
        let closed = r_fraction_closed(p)?;
        all_match &= counted == closed;
        r_rows.push((i, counted, closed));
    }
    match format {
        Format::Json => {
            let m_obj: Value = m_rows
                .iter()
                .map(|(i, c, _)| (i.to_string(), Value::String(c.to_string())))
                .collect::<serde_json::Map<_, _>>()
                .into();
            let r_obj: Value = r_rows
                .iter()
                .map(|(i, c, _)| (i.to_string(), Value::String(c.to_string())))
                .collect::<serde_json::Map<_, _>>()
                .into();
            Ok(Rendered {
                body: pretty(&json!({
                    "p": p,
                    "alpha": alpha,
                    "M": m_obj,
                    "R": r_obj,
                    "closed_forms_match": all_match,
                })),
                ok: all_match,
            })
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "p = {p}, section index {alpha}").unwrap();
            writeln!(out, "component fractions:").unwrap();
            for (i, counted, closed) in &m_rows {
                writeln!(out, "  i={i}: {counted} (closed form {closed})").unwrap();
            }
            writeln!(out, "root-of-unity fractions:").unwrap();
            for (i, counted, closed) in &r_rows {
                writeln!(out, "  i={i}: {counted} (closed form {closed})").unwrap();
            }
            writeln!(
                out,
                "{}",
                if all_match {
                    "all enumerated fractions match the closed forms"
                } else {
                    "MISMATCH between enumeration and closed forms"
                }
            )
            .unwrap();
            Ok(Rendered { body: out, ok: all_match })
        }
    }
}

fn render_zmatrix(p: u64, format: Format) -> Result<Rendered, CliError> {
    let z = z_matrix(p)?;
    let h = ((p - 1) / 2) as usize;
    let full: Vec<u64> = (1..=h as u64).collect();
    let mut latin = true;
    for i in 0..h {
        let mut row = z[i].clone();
        row.sort_unstable();
        let mut col: Vec<u64> = (0..h).map(|j| z[j][i]).collect();
        col.sort_unstable();
        latin &= row == full && col == full;
    }
    match format {
        Format::Json => Ok(Rendered {
            body: pretty(&json!({ "p": p, "classes": full, "z": z, "latin": latin })),
            ok: latin,
        }),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "p = {p}, classes 1..{h}").unwrap();
            for row in &z {
                let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                writeln!(out, "{}", cells.join(" ")).unwrap();
            }
            writeln!(
                out,
                "{}",
                if latin {
                    "each row and column is a permutation of the classes"
                } else {
                    "NOT a Latin square"
                }
            )
            .unwrap();
            Ok(Rendered { body: out, ok: latin })
        }
    }
}

fn render_involution(p: u64, format: Format) -> Result<Rendered, CliError> {
    let duality = duality_check(p)?;
    let quotient = quotient_component_numbers(p)?;
    let cross = weil_cross_check(p)?;
    let ok = duality.all_pass && cross.all_pass;
    match format {
        Format::Json => Ok(Rendered {
            body: pretty(&json!({
                "p": p,
                "duality": serde_json::to_value(&duality)?,
                "quotient": serde_json::to_value(&quotient)?,
                "inverse_cross_check": serde_json::to_value(&cross)?,
                "all_pass": ok,
            })),
            ok,
        }),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "p = {p}").unwrap();
            writeln!(
                out,
                "duality ell = k^(-1) across the involution: {}",
                if duality.all_pass { "PASS" } else { "FAIL" }
            )
            .unwrap();
            for e in &duality.entries {
                writeln!(
                    out,
                    "  {} -> {}: ell = {}, k = {}{}",
                    e.cusp.rep(),
                    e.image.rep(),
                    e.ell,
                    e.k_at_image,
                    if e.pass { "" } else { "  MISMATCH" }
                )
                .unwrap();
            }
            writeln!(out, "quotient component classes:").unwrap();
            for e in &quotient {
                writeln!(
                    out,
                    "  {} ({}) -> {}: k = {}",
                    e.cusp.rep(),
                    e.cusp.kind(),
                    e.quotient_kind,
                    e.k.map(|g| g.rep().to_string()).unwrap_or_else(|| String::from("-")),
                )
                .unwrap();
            }
            writeln!(
                out,
                "Euclidean vs Fermat inverses over {} entries: {}",
                cross.entries.len(),
                if cross.all_pass { "PASS" } else { "FAIL" }
            )
            .unwrap();
            Ok(Rendered { body: out, ok })
        }
    }
}

fn render_weil(
    m: u64,
    k: u64,
    p1: &LabelArg,
    p2: &LabelArg,
    format: Format,
) -> Result<Rendered, CliError> {
    if m == 0 || k == 0 {
        return Err(CliError::Usage(String::from(
            "both the torsion order and the multiplier must be positive",
        )));
    }
    let shape = FiberShape::new(m * k)?;
    let a = TorsionLabel::new(m, p1.t, p1.s)?;
    let b = TorsionLabel::new(m, p2.t, p2.s)?;
    let definitional = weil_definitional(shape, m, a, b)?;
    let formula = weil_formula(m, a, b)?;
    let agree = definitional == formula;
    match format {
        Format::Json => Ok(Rendered {
            body: pretty(&json!({
                "m": m,
                "k": k,
                "p1": { "t": a.t, "s": a.s },
                "p2": { "t": b.t, "s": b.s },
                "definitional": definitional.to_string(),
                "formula": formula.to_string(),
                "agree": agree,
            })),
            ok: agree,
        }),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "{} fiber, {m}-torsion", shape).unwrap();
            writeln!(out, "P1 = M({}, {}), P2 = M({}, {})", a.t, a.s, b.t, b.s).unwrap();
            writeln!(out, "definitional: {definitional}").unwrap();
            writeln!(out, "closed form:  {formula}").unwrap();
            writeln!(
                out,
                "{}",
                if agree {
                    "the two routes agree"
                } else {
                    "MISMATCH between the two routes"
                }
            )
            .unwrap();
            Ok(Rendered { body: out, ok: agree })
        }
    }
}

fn render_abel(path: &PathBuf, expect_m: Option<u64>, format: Format) -> Result<Rendered, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let divisor: Divisor = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad divisor file: {e}")))?;
    let m = divisor.shape().components();
    if let Some(expected) = expect_m {
        if expected != m {
            return Err(CliError::Usage(format!(
                "the file describes {m} components, expected {expected}"
            )));
        }
    }
    let degree = divisor.degree();
    let total = divisor.sum()?;
    let principal = abel_check(&divisor);
    let witness = match abel_witness(&divisor) {
        Ok(w) => Some(w),
        Err(AbelError::NotPrincipal { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    // The witness exists exactly when both checks pass; anything else means
    // the two routes disagree.
    let ok = witness.is_some() == principal
        && witness.as_ref().map(|w| w.div_map() == divisor).unwrap_or(true);
    match format {
        Format::Json => Ok(Rendered {
            body: pretty(&json!({
                "m": m,
                "degree": degree,
                "group_sum": total.to_string(),
                "principal": principal,
                "witness": witness.as_ref().map(|w| serde_json::to_value(w)).transpose()?,
            })),
            ok,
        }),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "{} fiber", divisor.shape()).unwrap();
            writeln!(out, "degree: {degree}").unwrap();
            writeln!(out, "group sum: {total}").unwrap();
            writeln!(out, "principal: {}", if principal { "yes" } else { "no" }).unwrap();
            if let Some(w) = &witness {
                writeln!(out, "witness:").unwrap();
                for (j, g) in w.funcs().iter().enumerate() {
                    writeln!(out, "  g_{j} = {g}").unwrap();
                }
            }
            Ok(Rendered { body: out, ok })
        }
    }
}
