//! WAV interchange: mono 16-bit little-endian PCM, unit amplitude mapped to
//! 90% of full scale.

use std::path::Path;

use super::Waveform;

pub const FULL_SCALE_FRACTION: f64 = 0.9;

#[derive(Debug, thiserror::Error)]
pub enum WavError {
    #[error(transparent)]
    Hound(#[from] hound::Error),
    #[error("unsupported wav format: {0}")]
    Unsupported(String),
}

fn spec(fs: f64) -> Result<hound::WavSpec, WavError> {
    if fs.fract() != 0.0 || fs <= 0.0 || fs > u32::MAX as f64 {
        return Err(WavError::Unsupported(format!("sample rate {fs}")));
    }
    Ok(hound::WavSpec {
        channels: 1,
        sample_rate: fs as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    })
}

fn to_pcm(x: f64) -> i16 {
    (x * FULL_SCALE_FRACTION * i16::MAX as f64)
        .round()
        .clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

pub fn write_wav<W: std::io::Write + std::io::Seek>(
    writer: W,
    waveform: &Waveform,
) -> Result<(), WavError> {
    let mut w = hound::WavWriter::new(writer, spec(waveform.fs)?)?;
    {
        let mut i16w = w.get_i16_writer(waveform.samples.len() as u32);
        for &x in &waveform.samples {
            i16w.write_sample(to_pcm(x));
        }
        i16w.flush()?;
    }
    w.finalize()?;
    Ok(())
}

pub fn write_wav_file(path: &Path, waveform: &Waveform) -> Result<(), WavError> {
    let file = std::io::BufWriter::new(std::fs::File::create(path).map_err(hound::Error::from)?);
    write_wav(file, waveform)
}

pub fn read_wav<R: std::io::Read>(reader: R) -> Result<Waveform, WavError> {
    let r = hound::WavReader::new(reader)?;
    let s = r.spec();
    if s.sample_format != hound::SampleFormat::Int || s.bits_per_sample != 16 {
        return Err(WavError::Unsupported(format!(
            "{:?} {}-bit samples",
            s.sample_format, s.bits_per_sample
        )));
    }
    let channels = s.channels.max(1) as usize;
    let scale = 1.0 / (FULL_SCALE_FRACTION * i16::MAX as f64);
    let samples = r
        .into_samples::<i16>()
        .step_by(channels)
        .map(|x| x.map(|v| v as f64 * scale))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Waveform::new(samples, s.sample_rate as f64))
}

pub fn read_wav_file(path: &Path) -> Result<Waveform, WavError> {
    let file = std::io::BufReader::new(std::fs::File::open(path).map_err(hound::Error::from)?);
    read_wav(file)
}
