//! Text serialization of [`KeyMaterial`].
//!
//! ```text
//! cghw-key 1
//! provenance derived
//! control halved
//! permutation keyed
//! stream 1 x0=4.3137254901960786e-1 a=1.4313725490196079e0 degree=2 burn_in=100 seed=100,10
//! stream 2 ...
//! stream 3 ...
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly. `seed=-` marks user-supplied keys.

use std::collections::HashMap;
use std::path::Path;

use crate::chaos::ChaoticParams;
use crate::error::{Error, Result};
use crate::image::write_atomic;
use crate::keys::{ControlScaling, KeyMaterial, PermutationSource, Provenance, SeedPair, StreamKey};

pub const KEY_FILE_VERSION: u32 = 1;
const HEADER: &str = "cghw-key";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_key_text(keys: &KeyMaterial) -> String {
    let mut out = format!("{HEADER} {KEY_FILE_VERSION}\n");
    out += match keys.provenance {
        Provenance::DerivedFromImage => "provenance derived\n",
        Provenance::UserSupplied => "provenance user\n",
    };
    out += match keys.control {
        ControlScaling::Halved => "control halved\n",
        ControlScaling::Unscaled => "control unscaled\n",
    };
    out += match keys.permutation {
        PermutationSource::Keyed => "permutation keyed\n",
        PermutationSource::DataSorted => "permutation data-sorted\n",
    };
    for (k, s) in keys.streams.iter().enumerate() {
        let seed = s
            .seed_pair
            .map_or_else(|| "-".to_string(), |p| format!("{},{}", p.lambda, p.mu));
        out += &format!(
            "stream {} x0={} a={} degree={} burn_in={} seed={}\n",
            k + 1,
            real(s.params.x0()),
            real(s.params.a()),
            s.params.degree(),
            s.burn_in,
            seed
        );
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::KeyFile(msg.into())
}

fn field<'a>(fields: &HashMap<&str, &'a str>, name: &str, line: usize) -> Result<&'a str> {
    fields
        .get(name)
        .copied()
        .ok_or_else(|| bad(format!("line {line}: missing {name}=")))
}

fn parse<T: std::str::FromStr>(text: &str, name: &str, line: usize) -> Result<T> {
    text.parse()
        .map_err(|_| bad(format!("line {line}: cannot parse {name}={text:?}")))
}

fn parse_stream(line_no: usize, expected: usize, rest: &[&str]) -> Result<StreamKey> {
    let (index, pairs) = rest
        .split_first()
        .ok_or_else(|| bad(format!("line {line_no}: empty stream record")))?;
    if parse::<usize>(index, "stream index", line_no)? != expected {
        return Err(bad(format!("line {line_no}: expected stream {expected}")));
    }
    let mut fields = HashMap::new();
    for pair in pairs {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| bad(format!("line {line_no}: malformed field {pair:?}")))?;
        fields.insert(k, v);
    }
    let x0: f64 = parse(field(&fields, "x0", line_no)?, "x0", line_no)?;
    let a: f64 = parse(field(&fields, "a", line_no)?, "a", line_no)?;
    let degree: u32 = parse(field(&fields, "degree", line_no)?, "degree", line_no)?;
    let burn_in: usize = parse(field(&fields, "burn_in", line_no)?, "burn_in", line_no)?;
    let seed_pair = match field(&fields, "seed", line_no)? {
        "-" => None,
        s => {
            let (l, m) = s
                .split_once(',')
                .ok_or_else(|| bad(format!("line {line_no}: seed must be lambda,mu")))?;
            Some(SeedPair {
                lambda: parse(l, "seed", line_no)?,
                mu: parse(m, "seed", line_no)?,
            })
        }
    };
    let params = ChaoticParams::new(x0, a, degree).map_err(|e| bad(format!("line {line_no}: {e}")))?;
    Ok(StreamKey {
        params,
        burn_in,
        seed_pair,
    })
}

pub fn parse_key_text(text: &str) -> Result<KeyMaterial> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(format!("truncated: missing {what}")));

    let (n, header) = next("header")?;
    match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        [HEADER, v] if parse::<u32>(v, "version", n)? == KEY_FILE_VERSION => {}
        [HEADER, v] => return Err(bad(format!("unsupported key file version {v}"))),
        _ => return Err(bad("not a key file")),
    }

    let mut setting = |name: &str| -> Result<(usize, String)> {
        let (n, line) = next(name)?;
        match line.split_once(' ') {
            Some((k, v)) if k == name => Ok((n, v.trim().to_string())),
            _ => Err(bad(format!("line {n}: expected `{name} ...`"))),
        }
    };
    let provenance = match setting("provenance")? {
        (_, v) if v == "derived" => Provenance::DerivedFromImage,
        (_, v) if v == "user" => Provenance::UserSupplied,
        (n, v) => return Err(bad(format!("line {n}: unknown provenance {v:?}"))),
    };
    let control = match setting("control")? {
        (_, v) if v == "halved" => ControlScaling::Halved,
        (_, v) if v == "unscaled" => ControlScaling::Unscaled,
        (n, v) => return Err(bad(format!("line {n}: unknown control {v:?}"))),
    };
    let permutation = match setting("permutation")? {
        (_, v) if v == "keyed" => PermutationSource::Keyed,
        (_, v) if v == "data-sorted" => PermutationSource::DataSorted,
        (n, v) => return Err(bad(format!("line {n}: unknown permutation {v:?}"))),
    };

    let mut streams = Vec::with_capacity(3);
    for k in 1..=3 {
        let (n, line) = next("stream record")?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.split_first() {
            Some((&"stream", rest)) => streams.push(parse_stream(n, k, rest)?),
            _ => return Err(bad(format!("line {n}: expected stream record"))),
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(bad(format!("line {n}: unexpected trailing content")));
    }
    Ok(KeyMaterial {
        streams: [streams[0], streams[1], streams[2]],
        provenance,
        control,
        permutation,
    })
}

pub fn write_key_file(keys: &KeyMaterial, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), to_key_text(keys).as_bytes())
}

pub fn read_key_file(path: impl AsRef<Path>) -> Result<KeyMaterial> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_key_text(&text)
}
