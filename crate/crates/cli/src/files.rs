//! Readers and writers for presentation, algebra, proof and clone files.
//!
//! Presentation files hold `sig NAME ARITY` lines followed by
//! `axiom @N LHS = RHS` lines; algebra files hold `carrier M` followed by
//! `table NAME v0 v1 …` in row-major tuple order. `#` starts a comment.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use unialg::algebra::{table_len, AlgebraError, FiniteAlgebra};
use unialg::clone::{CloneError, ExplicitClone};
use unialg::logic::{parse_script, LogicError, Proof, ProofError};
use unialg::term::{Equation, Presentation, Signature, TermError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{file}: {msg}")]
    Io { file: String, msg: String },
    #[error("{file}:{line}: {msg}")]
    Syntax {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Invalid(String),
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for InputError {
            fn from(e: $t) -> Self {
                InputError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(AlgebraError, CloneError, LogicError, TermError);

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::Io {
        file: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "input".to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn parse_presentation(name: &str, text: &str, file: &str) -> Result<Presentation, InputError> {
    let err = |line: usize, msg: String| InputError::Syntax {
        file: file.to_string(),
        line,
        msg,
    };
    let mut symbols: Vec<(String, usize)> = Vec::new();
    let mut axiom_lines: Vec<(usize, usize, &str)> = Vec::new();
    for (no, line) in lines(text) {
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "sig" => {
                if !axiom_lines.is_empty() {
                    return Err(err(no, "`sig` lines must precede the axioms".into()));
                }
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [name, arity] = parts.as_slice() else {
                    return Err(err(no, "expected `sig NAME ARITY`".into()));
                };
                let arity = arity
                    .parse()
                    .map_err(|_| err(no, format!("bad arity `{arity}`")))?;
                symbols.push((name.to_string(), arity));
            }
            "axiom" => {
                let rest = rest.trim_start();
                let (ctx, body) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let n = ctx
                    .strip_prefix('@')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| err(no, "expected `axiom @N LHS = RHS`".into()))?;
                axiom_lines.push((no, n, body));
            }
            other => return Err(err(no, format!("unknown directive `{other}`"))),
        }
    }
    let sig = Signature::from_symbols(symbols.iter().map(|(s, k)| (s.as_str(), *k)))
        .map_err(|e| err(0, e.to_string()))?;
    let axioms = axiom_lines
        .into_iter()
        .map(|(no, n, body)| Equation::parse_in(&sig, n, body).map_err(|e| err(no, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Presentation::new(name, sig, axioms).map_err(|e| err(0, e.to_string()))
}

pub fn load_presentation(path: &Path) -> Result<Presentation, InputError> {
    parse_presentation(&stem(path), &read(path)?, &path.display().to_string())
}

pub fn presentation_to_text(pres: &Presentation) -> String {
    let mut out = String::new();
    for s in pres.signature().symbols() {
        let _ = writeln!(out, "sig {} {}", s.name(), s.arity());
    }
    for ax in pres.axioms() {
        let _ = writeln!(out, "axiom @{} {} = {}", ax.context(), ax.lhs(), ax.rhs());
    }
    out
}

/// Reads an algebra. With a signature, every symbol needs exactly one table
/// and arities come from the signature; without one, arities are inferred
/// from table lengths, which needs a carrier of at least two elements.
pub fn parse_algebra(
    name: &str,
    text: &str,
    file: &str,
    sig: Option<&Signature>,
) -> Result<FiniteAlgebra, InputError> {
    let err = |line: usize, msg: String| InputError::Syntax {
        file: file.to_string(),
        line,
        msg,
    };
    let mut size = None;
    let mut tables: Vec<(usize, String, Vec<usize>)> = Vec::new();
    for (no, line) in lines(text) {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("carrier") => {
                if size.is_some() {
                    return Err(err(no, "repeated `carrier` line".into()));
                }
                let m: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err(no, "expected `carrier M`".into()))?;
                if words.next().is_some() {
                    return Err(err(no, "expected `carrier M`".into()));
                }
                size = Some(m);
            }
            Some("table") => {
                if size.is_none() {
                    return Err(err(no, "`carrier` must come first".into()));
                }
                let name = words
                    .next()
                    .ok_or_else(|| err(no, "expected `table NAME v0 v1 …`".into()))?;
                let values = words
                    .map(|w| {
                        w.parse::<usize>()
                            .map_err(|_| err(no, format!("bad table entry `{w}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if tables.iter().any(|(_, n, _)| n == name) {
                    return Err(err(no, format!("repeated table `{name}`")));
                }
                tables.push((no, name.to_string(), values));
            }
            Some(other) => return Err(err(no, format!("unknown directive `{other}`"))),
            None => {}
        }
    }
    let m = size.ok_or_else(|| err(0, "missing `carrier` line".into()))?;
    let sig = match sig {
        Some(s) => s.clone(),
        None => {
            let mut symbols = Vec::new();
            for (no, name, values) in &tables {
                let arity = (0..=8)
                    .find(|&k| table_len(m, k) == Some(values.len()))
                    .ok_or_else(|| {
                        err(
                            *no,
                            format!("{} entries is not a power of {m}", values.len()),
                        )
                    })?;
                if m < 2 {
                    return Err(err(
                        *no,
                        "arities cannot be inferred on a carrier below 2; give a presentation"
                            .into(),
                    ));
                }
                symbols.push((name.as_str(), arity));
            }
            Signature::from_symbols(symbols).map_err(|e| err(0, e.to_string()))?
        }
    };
    for (no, name, values) in &tables {
        let Some(sym) = sig.symbols().iter().find(|s| s.name() == name) else {
            return Err(err(*no, format!("`{name}` is not in the signature")));
        };
        let expected = table_len(m, sym.arity()).unwrap_or(usize::MAX);
        if values.len() != expected {
            return Err(err(
                *no,
                format!(
                    "`{name}` has arity {} and needs {expected} entries, got {}",
                    sym.arity(),
                    values.len()
                ),
            ));
        }
    }
    let named: Vec<(&str, Vec<usize>)> = tables
        .iter()
        .map(|(_, n, v)| (n.as_str(), v.clone()))
        .collect();
    FiniteAlgebra::from_named(name, sig, m, &named).map_err(|e| err(0, e.to_string()))
}

pub fn load_algebra(path: &Path, sig: Option<&Signature>) -> Result<FiniteAlgebra, InputError> {
    parse_algebra(&stem(path), &read(path)?, &path.display().to_string(), sig)
}

pub fn algebra_to_text(alg: &FiniteAlgebra) -> String {
    let mut out = format!("# {}\ncarrier {}\n", alg.name(), alg.size());
    for (s, t) in alg.signature().symbols().iter().zip(alg.tables()) {
        let values: String = t.table().iter().map(|v| format!(" {v}")).collect();
        let _ = writeln!(out, "table {}{values}", s.name());
    }
    out
}

/// Every `*.alg` file in `dir` whose tables match `sig`, by file name.
/// Files for other signatures are skipped; malformed files are errors.
pub fn load_fixture_dir(dir: &Path, sig: &Signature) -> Result<Vec<FiniteAlgebra>, InputError> {
    let io = |e: std::io::Error| InputError::Io {
        file: dir.display().to_string(),
        msg: e.to_string(),
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()).map_err(io))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "alg"));
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let text = read(&p)?;
        let alg = parse_algebra(&stem(&p), &text, &p.display().to_string(), None);
        let matches = match &alg {
            Ok(a) => {
                a.signature().symbols().iter().all(|s| sig.contains(s))
                    && a.signature().len() == sig.len()
            }
            // Carriers below 2 need the signature to be read.
            Err(_) => true,
        };
        if matches {
            out.push(load_algebra(&p, Some(sig))?);
        }
    }
    Ok(out)
}

/// Reads a proof script. Syntax errors are input errors with a line number;
/// elaboration errors (bad axiom index, mismatched rules) are returned for
/// reporting.
pub fn load_proof(
    path: &Path,
    pres: &Presentation,
) -> Result<Result<Proof, ProofError>, InputError> {
    let text = read(path)?;
    match parse_script(pres, &text) {
        Err(ProofError::Syntax { pos, msg }) => {
            let line = text[..pos.min(text.len())].matches('\n').count() + 1;
            Err(InputError::Syntax {
                file: path.display().to_string(),
                line,
                msg,
            })
        }
        other => Ok(other),
    }
}

pub fn load_clone(path: &Path) -> Result<ExplicitClone, InputError> {
    ExplicitClone::parse(&read(path)?)
        .map_err(|e| InputError::Invalid(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError::Io {
        file: path.display().to_string(),
        msg: e.to_string(),
    })
}
