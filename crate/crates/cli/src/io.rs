//! Recording input for the `estimate` subcommand.
//!
//! Two formats are accepted:
//!
//! * **bin** — headerless little-endian `f64`, channel-interleaved
//!   (`ch0[0], ch1[0], …, ch0[1], …`), described by a sidecar text file at
//!   `<input>.meta` holding whitespace-separated `key=value` pairs:
//!   `channels=<M> sample_rate_hz=<f_s>`.
//! * **text** — one time sample per line, M whitespace-separated columns.
//!
//! Without an explicit format, `bin` is assumed when the sidecar exists.

use std::path::Path;

use tdoa_core::SensorRecording;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Bin,
    Text,
}

impl std::str::FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bin" => Ok(InputFormat::Bin),
            "text" => Ok(InputFormat::Text),
            other => Err(format!("unknown format '{other}' (expected bin or text)")),
        }
    }
}

pub fn sidecar_path(input: &Path) -> std::path::PathBuf {
    let mut name = input.as_os_str().to_owned();
    name.push(".meta");
    name.into()
}

/// Load a multichannel recording. `sample_rate_override` wins over any
/// sidecar value; text input without either falls back to 48 kHz.
pub fn read_recording(
    input: &Path,
    format: Option<InputFormat>,
    sample_rate_override: Option<f64>,
    pair: (usize, usize),
) -> Result<SensorRecording, CliError> {
    let format = format.unwrap_or_else(|| {
        if sidecar_path(input).exists() {
            InputFormat::Bin
        } else {
            InputFormat::Text
        }
    });
    let (channels, sidecar_rate) = match format {
        InputFormat::Bin => read_bin(input)?,
        InputFormat::Text => (read_text(input)?, None),
    };
    let sample_rate = sample_rate_override.or(sidecar_rate).unwrap_or(48_000.0);
    SensorRecording::from_channels(channels, sample_rate, pair).map_err(|e| {
        CliError::Config(format!("{}: {e}", input.display()))
    })
}

fn read_bin(input: &Path) -> Result<(Vec<Vec<f64>>, Option<f64>), CliError> {
    let meta_path = sidecar_path(input);
    let meta = std::fs::read_to_string(&meta_path)
        .map_err(|e| CliError::io(format!("cannot read sidecar {}", meta_path.display()), e))?;
    let mut channels_count: Option<usize> = None;
    let mut sample_rate: Option<f64> = None;
    for token in meta.split_whitespace() {
        let (key, value) = token.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{}: expected key=value tokens", meta_path.display()))
        })?;
        match key {
            "channels" => {
                channels_count = Some(value.parse().map_err(|e| {
                    CliError::Config(format!("{}: channels: {e}", meta_path.display()))
                })?)
            }
            "sample_rate_hz" => {
                sample_rate = Some(value.parse().map_err(|e| {
                    CliError::Config(format!("{}: sample_rate_hz: {e}", meta_path.display()))
                })?)
            }
            other => {
                return Err(CliError::Config(format!(
                    "{}: unknown key '{other}'",
                    meta_path.display()
                )))
            }
        }
    }
    let m = channels_count.ok_or_else(|| {
        CliError::Config(format!("{}: missing 'channels'", meta_path.display()))
    })?;
    if m < 2 {
        return Err(CliError::Config("input needs at least 2 channels".into()));
    }

    let bytes = std::fs::read(input)
        .map_err(|e| CliError::io(format!("cannot read {}", input.display()), e))?;
    if bytes.len() % 8 != 0 {
        return Err(CliError::Config(format!(
            "{}: length is not a multiple of 8 bytes",
            input.display()
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if values.len() % m != 0 {
        return Err(CliError::Config(format!(
            "{}: sample count {} is not a multiple of {m} channels",
            input.display(),
            values.len()
        )));
    }
    let frames = values.len() / m;
    let mut channels = vec![Vec::with_capacity(frames); m];
    for frame in values.chunks_exact(m) {
        for (ch, &v) in channels.iter_mut().zip(frame) {
            ch.push(v);
        }
    }
    Ok((channels, sample_rate))
}

fn read_text(input: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::io(format!("cannot read {}", input.display()), e))?;
    let mut channels: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|e| {
                    CliError::Config(format!("{}: line {}: {e}", input.display(), lineno + 1))
                })
            })
            .collect::<Result<_, _>>()?;
        if channels.is_empty() {
            channels = vec![Vec::new(); row.len()];
        }
        if row.len() != channels.len() {
            return Err(CliError::Config(format!(
                "{}: line {}: expected {} columns, found {}",
                input.display(),
                lineno + 1,
                channels.len(),
                row.len()
            )));
        }
        for (ch, v) in channels.iter_mut().zip(row) {
            ch.push(v);
        }
    }
    if channels.len() < 2 {
        return Err(CliError::Config("input needs at least 2 channels".into()));
    }
    Ok(channels)
}

/// Serialize channels in the binary layout `read_recording` accepts.
/// Used by tests and by library callers producing fixture files.
pub fn write_bin(
    input: &Path,
    channels: &[Vec<f64>],
    sample_rate_hz: f64,
) -> Result<(), CliError> {
    let frames = channels.first().map(|c| c.len()).unwrap_or(0);
    let mut bytes = Vec::with_capacity(frames * channels.len() * 8);
    for t in 0..frames {
        for ch in channels {
            bytes.extend_from_slice(&ch[t].to_le_bytes());
        }
    }
    std::fs::write(input, bytes)
        .map_err(|e| CliError::io(format!("cannot write {}", input.display()), e))?;
    std::fs::write(
        sidecar_path(input),
        format!("channels={} sample_rate_hz={}\n", channels.len(), sample_rate_hz),
    )
    .map_err(|e| CliError::io(format!("cannot write sidecar for {}", input.display()), e))
}
