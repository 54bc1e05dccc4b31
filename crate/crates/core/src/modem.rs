use crate::{
    bits::BitString,
    fec::{code_pipeline_encode, CodingMode},
    phy::{
        frame, Chirps, FrameHeader, FramePlan, ModulationParams, PhyError, Receiver,
        ReceiverConfig, Reception, Waveform,
    },
    textcodec::{decode_bits, encode_text, normalize_with, SymbolAlphabet},
    Result,
};

/// Text-in, audio-out modem: codec, channel coding and CSS framing.
#[derive(Debug)]
pub struct Modem {
    alphabet: SymbolAlphabet,
    chirps: Chirps,
    rx: ReceiverConfig,
}

/// A rendered packet and what it carries.
#[derive(Clone, Debug)]
pub struct Transmission {
    pub waveform: Waveform,
    pub payload_bits: BitString,
    pub plan: FramePlan,
    /// Normalized text, when the payload came from text.
    pub text: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ReceivedText {
    pub text: String,
    pub reception: Reception,
}

impl Default for Modem {
    fn default() -> Self {
        Self::new(ModulationParams::default(), SymbolAlphabet::default())
            .expect("default parameters are valid")
    }
}

impl Modem {
    pub fn new(params: ModulationParams, alphabet: SymbolAlphabet) -> Result<Self> {
        Ok(Self { alphabet, chirps: Chirps::new(params)?, rx: ReceiverConfig::default() })
    }

    pub fn with_receiver_config(mut self, rx: ReceiverConfig) -> Self {
        self.rx = rx;
        self
    }

    pub fn params(&self) -> &ModulationParams {
        self.chirps.params()
    }

    pub fn alphabet(&self) -> &SymbolAlphabet {
        &self.alphabet
    }

    pub fn chirps(&self) -> &Chirps {
        &self.chirps
    }

    pub fn receiver(&self) -> Receiver<'_> {
        Receiver::new(&self.chirps, self.rx)
    }

    pub fn receiver_with(&self, rx: ReceiverConfig) -> Receiver<'_> {
        Receiver::new(&self.chirps, rx)
    }

    pub fn transmit_bits(&self, payload: &BitString, mode: CodingMode) -> Result<Transmission> {
        if payload.len() > FrameHeader::MAX_PAYLOAD_BITS {
            return Err(PhyError::PayloadTooLong(payload.len()).into());
        }
        let plan = FramePlan::new(payload.len(), mode, self.params().sf);
        let coded = code_pipeline_encode(payload, mode);
        Ok(Transmission {
            waveform: frame(&coded, &self.chirps, &plan),
            payload_bits: payload.clone(),
            plan,
            text: None,
        })
    }

    /// Normalizes `raw`, encodes it and renders the packet.
    pub fn transmit_text(&self, raw: &str, mode: CodingMode) -> Result<Transmission> {
        let text = normalize_with(raw, &self.alphabet)?;
        let bits = encode_text(&text, &self.alphabet)?;
        let mut tx = self.transmit_bits(&bits, mode)?;
        tx.text = Some(text);
        Ok(tx)
    }

    pub fn receive_bits(&self, stream: &[f64]) -> Result<Reception, PhyError> {
        self.receiver().receive_first(stream)
    }

    pub fn receive_text(&self, stream: &Waveform) -> Result<ReceivedText> {
        let reception = self.receive_bits(&stream.samples)?;
        Ok(ReceivedText { text: decode_bits(&reception.payload_bits, &self.alphabet), reception })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loopback_both_modes() {
        let m = Modem::default();
        for mode in [CodingMode::Cr0, CodingMode::Cr3] {
            let tx = m.transmit_text("Tank at 650 psi, ascend now!", mode).unwrap();
            let stream = tx.waveform.padded(5_000, 3_000);
            let rx = m.receive_text(&stream).unwrap();
            assert_eq!(rx.text, "tank at six hundred fifty psi, ascend now!");
            assert_eq!(rx.reception.header.mode, mode);
            assert_eq!(rx.reception.corrected_codewords, 0);
        }
    }

    #[test]
    fn silence_has_no_packet() {
        let m = Modem::default();
        let err = m.receive_bits(&vec![0.0; 50_000]).unwrap_err();
        assert_eq!(err, PhyError::NoPacketFound);
    }

    #[test]
    fn two_packets_in_one_stream() {
        let m = Modem::default();
        let a = m.transmit_text("go up", CodingMode::Cr3).unwrap();
        let b = m.transmit_text("ok", CodingMode::Cr0).unwrap();
        let mut s = a.waveform.padded(1_000, 800).samples;
        s.extend(b.waveform.padded(0, 1_000).samples);
        let got = m.receiver().receive_all(&s);
        assert_eq!(got.len(), 2);
        let texts: Vec<String> = got
            .into_iter()
            .map(|r| decode_bits(&r.unwrap().payload_bits, m.alphabet()))
            .collect();
        assert_eq!(texts, vec!["go up", "ok"]);
    }
}
