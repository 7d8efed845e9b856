//! Text encodings for crypto inputs and outputs.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// How bytes are rendered as text (or passed through untouched).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Utf8,
    Hex,
    Base64,
    Raw,
}

impl Encoding {
    pub const ALL: [Encoding; 4] = [Encoding::Utf8, Encoding::Hex, Encoding::Base64, Encoding::Raw];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Utf8 => "utf8",
            Encoding::Hex => "hex",
            Encoding::Base64 => "base64",
            Encoding::Raw => "raw",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoding {
    type Err = EncodingError;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        match name.to_ascii_lowercase().as_str() {
            "utf8" | "utf-8" => Ok(Encoding::Utf8),
            "hex" => Ok(Encoding::Hex),
            "base64" => Ok(Encoding::Base64),
            "raw" | "raw-bytes" => Ok(Encoding::Raw),
            _ => Err(EncodingError::Unknown {
                name: name.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("unknown encoding '{name}'; valid encodings are utf8, hex, base64 and raw")]
    Unknown { name: String },
    #[error("input is not valid hex: {detail}; check that the input encoding matches the data")]
    InvalidHex { detail: String },
    #[error("input is not valid base64: {detail}; check that the input encoding matches the data")]
    InvalidBase64 { detail: String },
    #[error(
        "bytes are not valid utf-8 text; choose hex, base64 or raw output instead of utf8"
    )]
    NotUtf8,
}

/// The result of a crypto operation: text under a text encoding, raw bytes
/// otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Text(String),
    Bytes(Vec<u8>),
}

impl Output {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Output::Text(s) => Some(s),
            Output::Bytes(_) => None,
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        match self {
            Output::Text(s) => s.as_bytes(),
            Output::Bytes(b) => b,
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        match self {
            Output::Text(s) => s.into_bytes(),
            Output::Bytes(b) => b,
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Text(s) => f.write_str(s),
            Output::Bytes(b) => write!(f, "<{} raw bytes>", b.len()),
        }
    }
}

/// Decodes text into bytes under `encoding`. For `utf8` and `raw` the text's
/// bytes pass through unchanged.
pub fn decode_text(encoding: Encoding, text: &str) -> Result<Vec<u8>, EncodingError> {
    match encoding {
        Encoding::Utf8 | Encoding::Raw => Ok(text.as_bytes().to_vec()),
        Encoding::Hex => hex::decode(text.trim()).map_err(|e| EncodingError::InvalidHex {
            detail: e.to_string(),
        }),
        Encoding::Base64 => {
            BASE64
                .decode(text.trim())
                .map_err(|e| EncodingError::InvalidBase64 {
                    detail: e.to_string(),
                })
        }
    }
}

/// Encodes bytes under `encoding`. `utf8` fails when the bytes are not valid
/// UTF-8 text rather than silently mangling them.
pub fn encode_bytes(encoding: Encoding, bytes: &[u8]) -> Result<Output, EncodingError> {
    match encoding {
        Encoding::Utf8 => String::from_utf8(bytes.to_vec())
            .map(Output::Text)
            .map_err(|_| EncodingError::NotUtf8),
        Encoding::Hex => Ok(Output::Text(hex::encode(bytes))),
        Encoding::Base64 => Ok(Output::Text(BASE64.encode(bytes))),
        Encoding::Raw => Ok(Output::Bytes(bytes.to_vec())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_lists_valid_encodings() {
        let err = "utf-9".parse::<Encoding>().unwrap_err();
        let message = err.to_string();
        for name in ["utf8", "hex", "base64", "raw"] {
            assert!(message.contains(name), "{message}");
        }
    }

    #[test]
    fn hex_round_trip() {
        let bytes = vec![0x00, 0xff, 0x10];
        let encoded = encode_bytes(Encoding::Hex, &bytes).unwrap();
        assert_eq!(encoded.as_text(), Some("00ff10"));
        assert_eq!(decode_text(Encoding::Hex, "00ff10").unwrap(), bytes);
    }

    #[test]
    fn utf8_rejects_invalid_sequences_on_encode() {
        let err = encode_bytes(Encoding::Utf8, &[0xff, 0xfe]).unwrap_err();
        assert_eq!(err, EncodingError::NotUtf8);
    }

    #[test]
    fn wrong_encoding_fails_to_decode() {
        assert!(decode_text(Encoding::Hex, "not hex!").is_err());
        assert!(decode_text(Encoding::Base64, "@@@").is_err());
    }

    #[test]
    fn aliases_parse() {
        assert_eq!("UTF-8".parse::<Encoding>().unwrap(), Encoding::Utf8);
        assert_eq!("raw-bytes".parse::<Encoding>().unwrap(), Encoding::Raw);
    }
}
