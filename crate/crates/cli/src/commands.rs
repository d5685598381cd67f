use std::ffi::OsString;
use std::path::{Path, PathBuf};

use posmap::choi::{canonicalize, choi_from_map, face_residual, find_face, map_from_choi, FacePair};
use posmap::decompose::{
    dykstra_decompose, random_boundary_map, random_face_map, uniqueness_probe, verify_decomposition,
    DecompositionResult,
};
use posmap::positivity::classify;
use posmap::{ComplexMatrix, ToleranceConfig};

use crate::mapfile::{Encoding, MapFile};
use crate::report::{
    margin_entries, sha256_hex, CanonicalSection, DecompositionSection, PositivitySection, ProbeAggregate, ProbeRow,
    ProbeSection, ReportDocument,
};
use crate::{Cli, CliError, Command, Outcome};

pub const EXIT_NOT_POSITIVE: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_NO_FACE: i32 = 6;

fn append(path: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// The path without its extension, followed by `suffix`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    append(&path.with_extension(""), suffix)
}

fn finish(doc: &mut ReportDocument, json: bool, code: i32, stderr: String) -> Outcome {
    doc.derive_verdicts();
    Outcome {
        stdout: if json { doc.to_json() } else { doc.to_text() },
        stderr,
        code,
    }
}

fn read_choi(path: &Path) -> Result<(MapFile, ComplexMatrix, String), CliError> {
    let (file, bytes) = MapFile::read(path)?;
    let h = choi_from_map(&file.map);
    Ok((file, h, sha256_hex(&bytes)))
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let json = cli.json;
    match &cli.command {
        Command::Check { path, grid, tol } => check(path, *grid, &tol.config()?, json),
        Command::Decompose {
            path,
            grid,
            max_iter,
            start,
            out,
            tol,
        } => decompose(path, *grid, *max_iter, start.as_deref(), out.as_deref(), &tol.config()?, json),
        Command::Verify { path, cp, ccp, tol } => verify(path, cp, ccp, &tol.config()?, json),
        Command::Probe {
            samples,
            seed,
            slack,
            starts,
            max_iter,
            tol,
        } => probe(*samples, *seed, slack, *starts, *max_iter, &tol.config()?, json),
        Command::Random {
            n,
            slack,
            seed,
            encoding,
            out,
        } => random(*n, *slack, *seed, *encoding, out.as_deref(), json),
        Command::Canonicalize { path, grid, out, tol } => canonical(path, *grid, out.as_deref(), &tol.config()?, json),
    }
}

pub fn check(path: &Path, grid: usize, tol: &ToleranceConfig, json: bool) -> Result<Outcome, CliError> {
    let (_, h, digest) = read_choi(path)?;
    let mut doc = ReportDocument::new("check", tol);
    doc.input_sha256 = Some(digest);
    doc.positivity = Some(PositivitySection::from(&classify(&h, grid, tol)?));
    Ok(finish(&mut doc, json, 0, String::new()))
}

pub fn decompose(
    path: &Path,
    grid: usize,
    max_iter: usize,
    start: Option<&Path>,
    out: Option<&Path>,
    tol: &ToleranceConfig,
    json: bool,
) -> Result<Outcome, CliError> {
    let (file, h, digest) = read_choi(path)?;
    let mut doc = ReportDocument::new("decompose", tol);
    doc.input_sha256 = Some(digest);
    let positivity = classify(&h, grid, tol)?;
    doc.positivity = Some(PositivitySection::from(&positivity));
    if !positivity.is_block_positive.holds() {
        let note = "error: the map is not positive; refusing to decompose\n".to_string();
        return Ok(finish(&mut doc, json, EXIT_NOT_POSITIVE, note));
    }

    let start = match start {
        Some(p) => {
            let s = choi_from_map(&MapFile::read(p)?.0.map);
            if s.shape() != h.shape() {
                return Err(CliError::Format("start map has a different output dimension".into()));
            }
            Some(s)
        }
        None => None,
    };
    let r = dykstra_decompose(&h, max_iter, tol.feas_tol, start.as_ref())?;
    doc.decomposition = Some(DecompositionSection::from(&r));
    doc.verification = Some(margin_entries(&verify_decomposition(&h, &r, tol)));
    if !r.converged {
        let note = format!("error: no splitting within {max_iter} iterations\n");
        return Ok(finish(&mut doc, json, EXIT_NOT_CONVERGED, note));
    }

    let prefix = out.map_or_else(|| path.with_extension(""), Path::to_path_buf);
    for (part, suffix) in [(&r.h1, ".cp.json"), (&r.h2, ".ccp.json")] {
        let target = append(&prefix, suffix);
        MapFile::new(map_from_choi(part)?, file.encoding).write(&target)?;
        doc.outputs.push(target.display().to_string());
    }
    Ok(finish(&mut doc, json, 0, String::new()))
}

pub fn verify(path: &Path, cp: &Path, ccp: &Path, tol: &ToleranceConfig, json: bool) -> Result<Outcome, CliError> {
    let (_, h, digest) = read_choi(path)?;
    let (_, h1, _) = read_choi(cp)?;
    let (_, h2, _) = read_choi(ccp)?;
    if h1.shape() != h.shape() || h2.shape() != h.shape() {
        return Err(CliError::Format("parts and map have different output dimensions".into()));
    }
    let r = DecompositionResult {
        h1,
        h2,
        residual: f64::NAN,
        iterations: 0,
        converged: true,
        cp_margin: f64::NAN,
        ppt_margin: f64::NAN,
        likely_non_decomposable: false,
        reduced_directions: 0,
        step_norms: Vec::new(),
    };
    let mut doc = ReportDocument::new("verify", tol);
    doc.input_sha256 = Some(digest);
    doc.verification = Some(margin_entries(&verify_decomposition(&h, &r, tol)));
    Ok(finish(&mut doc, json, 0, String::new()))
}

pub fn probe(
    samples: usize,
    seed: u64,
    slacks: &[f64],
    starts: usize,
    max_iter: usize,
    tol: &ToleranceConfig,
    json: bool,
) -> Result<Outcome, CliError> {
    let groups: Vec<Option<f64>> = if slacks.is_empty() {
        vec![None]
    } else {
        slacks.iter().copied().map(Some).collect()
    };
    let mut rows = Vec::new();
    for &slack in &groups {
        for i in 0..samples {
            let s = seed.wrapping_add(i as u64);
            let map = match slack {
                None => random_boundary_map(s, tol)?,
                Some(x) => random_face_map(s, 2, x, tol)?,
            };
            let h = choi_from_map(&map);
            let r = uniqueness_probe(&h, starts, s, max_iter, tol.feas_tol, tol)?;
            rows.push(ProbeRow::new(slack, s, &r));
        }
    }
    let aggregates = groups
        .iter()
        .map(|&g| {
            let members: Vec<&ProbeRow> = rows.iter().filter(|r| r.slack == g).collect();
            ProbeAggregate::new(g, &members)
        })
        .collect();
    let mut doc = ReportDocument::new("probe", tol);
    doc.probe = Some(ProbeSection { rows, aggregates });
    Ok(finish(&mut doc, json, 0, String::new()))
}

pub fn random(
    n: usize,
    slack: f64,
    seed: u64,
    encoding: Encoding,
    out: Option<&Path>,
    json: bool,
) -> Result<Outcome, CliError> {
    let tol = ToleranceConfig::default();
    let file = MapFile::new(random_face_map(seed, n, slack, &tol)?, encoding);
    let Some(out) = out else {
        return Ok(Outcome {
            stdout: file.to_json(),
            stderr: String::new(),
            code: 0,
        });
    };
    file.write(out)?;
    let mut doc = ReportDocument::new("random", &tol);
    doc.outputs.push(out.display().to_string());
    Ok(finish(&mut doc, json, 0, String::new()))
}

pub fn canonical(
    path: &Path,
    grid: usize,
    out: Option<&Path>,
    tol: &ToleranceConfig,
    json: bool,
) -> Result<Outcome, CliError> {
    let (file, _, digest) = read_choi(path)?;
    let mut doc = ReportDocument::new("canonicalize", tol);
    doc.input_sha256 = Some(digest);
    let Some(face) = find_face(&file.map, grid, tol) else {
        let note = "error: no maximal face found; the map may be interior (this is not a proof)\n".to_string();
        return Ok(finish(&mut doc, json, EXIT_NO_FACE, note));
    };
    let c = canonicalize(&file.map, &face, tol)?;
    let residual = face_residual(&c.map, &FacePair::canonical(c.map.n_out()))?;
    doc.canonicalization = Some(CanonicalSection::new(&face, &c, residual));
    doc.positivity = Some(PositivitySection::from(&classify(&choi_from_map(&c.map), grid, tol)?));
    let target = out.map_or_else(|| sibling(path, ".canonical.json"), Path::to_path_buf);
    MapFile::new(c.map, file.encoding).write(&target)?;
    doc.outputs.push(target.display().to_string());
    Ok(finish(&mut doc, json, 0, String::new()))
}
