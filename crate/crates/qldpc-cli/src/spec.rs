//! Code specification parsing and assembly: a source design or matrix, an
//! assembly step, and an assistance mode.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use qldpc::designs::{import_alist, PairwiseBalancedDesign};
use qldpc::galois::{ag_lines, pg_lines, GeometryKind};
use qldpc::gf2::BinaryMatrix;
use qldpc::qcode::{
    build_standard_form, extend_addr, peg_construct, StandardFormCode,
};

/// Where the parity-check structure comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Ag(u32, u64),
    Pg(u32, u64),
    Bose(usize),
    Peg {
        rows: usize,
        cols: usize,
        col_weight: usize,
        seed: u64,
    },
    Alist(PathBuf),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Ag(m, q) => write!(f, "ag({m},{q})"),
            Source::Pg(m, q) => write!(f, "pg({m},{q})"),
            Source::Bose(v) => write!(f, "bose({v})"),
            Source::Peg {
                rows,
                cols,
                col_weight,
                seed,
            } => write!(f, "peg({rows},{cols},{col_weight},{seed})"),
            Source::Alist(path) => write!(f, "alist({})", path.display()),
        }
    }
}

impl FromStr for Source {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s
            .split_once('(')
            .and_then(|(name, rest)| rest.strip_suffix(')').map(|args| (name.trim(), args)))
            .ok_or_else(|| anyhow!("expected source like ag(4,3), got {s:?}"))?;
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let number = |i: usize| -> Result<u64> {
            parts
                .get(i)
                .ok_or_else(|| anyhow!("{name} needs more arguments"))?
                .parse::<u64>()
                .with_context(|| format!("bad argument {:?} for {name}", parts[i]))
        };
        match name {
            "ag" | "pg" => {
                if parts.len() != 2 {
                    bail!("{name}(m,q) takes exactly two arguments");
                }
                let m = u32::try_from(number(0)?)?;
                let q = number(1)?;
                Ok(if name == "ag" {
                    Source::Ag(m, q)
                } else {
                    Source::Pg(m, q)
                })
            }
            "bose" => {
                if parts.len() != 1 {
                    bail!("bose(v) takes exactly one argument");
                }
                Ok(Source::Bose(number(0)? as usize))
            }
            "peg" => {
                if parts.len() != 4 {
                    bail!("peg(rows,cols,col_weight,seed) takes exactly four arguments");
                }
                Ok(Source::Peg {
                    rows: number(0)? as usize,
                    cols: number(1)? as usize,
                    col_weight: number(2)? as usize,
                    seed: number(3)?,
                })
            }
            "alist" => {
                if parts.len() != 1 || parts[0].is_empty() {
                    bail!("alist(path) takes exactly one argument");
                }
                Ok(Source::Alist(PathBuf::from(parts[0])))
            }
            other => bail!("unknown source {other:?} (expected ag, pg, bose, peg, or alist)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Assembly {
    /// The incidence (or imported/generated) matrix itself.
    Incidence,
    /// `[I | A]` standard form over the design.
    StandardForm,
    /// Identity block plus all-one bottom row extension.
    AddrExtend,
}

impl fmt::Display for Assembly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assembly::Incidence => write!(f, "incidence"),
            Assembly::StandardForm => write!(f, "standard_form"),
            Assembly::AddrExtend => write!(f, "addr_extend"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Rqa,
    Ea,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Rqa => write!(f, "rqa"),
            Mode::Ea => write!(f, "ea"),
        }
    }
}

/// A fully assembled parity-check matrix with its provenance.
pub struct AssembledCode {
    pub id: String,
    pub mode: Mode,
    pub assembly: Assembly,
    pub matrix: BinaryMatrix,
    /// The source design, when the source is design-based.
    pub design: Option<PairwiseBalancedDesign>,
    pub geometry: Option<(GeometryKind, u32, u64)>,
    /// Present when the assembly is standard form.
    pub standard: Option<StandardFormCode>,
}

/// Design, raw matrix, and geometry metadata loaded from a source.
type LoadedSource = (
    Option<PairwiseBalancedDesign>,
    Option<BinaryMatrix>,
    Option<(GeometryKind, u32, u64)>,
);

fn load_source(source: &Source) -> Result<LoadedSource> {
    match source {
        Source::Ag(m, q) => {
            let g = ag_lines(*m, *q)?;
            Ok((Some(g.design), None, Some((GeometryKind::Affine, *m, *q))))
        }
        Source::Pg(m, q) => {
            let g = pg_lines(*m, *q)?;
            Ok((
                Some(g.design),
                None,
                Some((GeometryKind::Projective, *m, *q)),
            ))
        }
        Source::Bose(v) => Ok((Some(qldpc::designs::bose_sts(*v)?), None, None)),
        Source::Peg {
            rows,
            cols,
            col_weight,
            seed,
        } => Ok((
            None,
            Some(peg_construct(*rows, *cols, *col_weight, *seed)?),
            None,
        )),
        Source::Alist(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok((None, Some(import_alist(&text)?), None))
        }
    }
}

/// Resolve the assembly/mode combination and build the parity-check matrix.
///
/// RQA requires standard form. EA defaults to the all-one row extension for
/// even-replicate Steiner sources and the plain incidence matrix otherwise.
pub fn assemble(source: &Source, assembly: Option<Assembly>, mode: Mode) -> Result<AssembledCode> {
    let (design, raw_matrix, geometry) = load_source(source)?;
    let assembly = match (assembly, mode) {
        (Some(Assembly::Incidence), Mode::Rqa) | (Some(Assembly::AddrExtend), Mode::Rqa) => {
            bail!("rqa mode requires the standard_form assembly")
        }
        (Some(Assembly::StandardForm), Mode::Ea) => {
            bail!("ea mode accepts the incidence or addr_extend assembly")
        }
        (Some(chosen), _) => chosen,
        (None, Mode::Rqa) => Assembly::StandardForm,
        (None, Mode::Ea) => match &design {
            Some(d)
                if d.steiner_block_size().is_some()
                    && d.replication_profile().even_replicate =>
            {
                Assembly::AddrExtend
            }
            _ => Assembly::Incidence,
        },
    };
    let design_for_assembly = |required: &str| -> Result<&PairwiseBalancedDesign> {
        design.as_ref().ok_or_else(|| {
            anyhow!("the {required} assembly needs a design source (ag, pg, or bose)")
        })
    };
    let (matrix, standard) = match assembly {
        Assembly::Incidence => {
            let matrix = match (&design, raw_matrix) {
                (_, Some(m)) => m,
                (Some(d), None) => d.incidence(),
                (None, None) => unreachable!("every source yields a design or a matrix"),
            };
            (matrix, None)
        }
        Assembly::StandardForm => {
            // Imported matrices are reinterpreted column-wise as a design so
            // the index-1 precondition is actually checked.
            let owned;
            let base = if let Some(d) = &design {
                d
            } else {
                owned = PairwiseBalancedDesign::from_incidence(raw_matrix.as_ref().unwrap())?;
                &owned
            };
            let code = build_standard_form(base)?;
            (code.matrix().clone(), Some(code))
        }
        Assembly::AddrExtend => {
            let base = design_for_assembly("addr_extend")?;
            (extend_addr(base)?, None)
        }
    };
    Ok(AssembledCode {
        id: format!("{source}:{assembly}"),
        mode,
        assembly,
        matrix,
        design,
        geometry,
        standard,
    })
}
