//! The ideal all-or-nothing oblivious transfer black box.
//!
//! Alice inputs one bit. Bob receives it with probability 1/2 and always
//! learns whether he did. Nothing flows back to Alice.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::SeedStream;

/// Bob's side of one transfer: either the bit, or an erasure he can recognize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AonOtOutcome {
    received: bool,
    value: Option<bool>,
}

impl AonOtOutcome {
    pub fn delivered(bit: bool) -> Self {
        Self {
            received: true,
            value: Some(bit),
        }
    }

    pub fn erased() -> Self {
        Self {
            received: false,
            value: None,
        }
    }

    pub fn received(&self) -> bool {
        self.received
    }

    /// The transferred bit, or `None` for an erasure.
    pub fn value(&self) -> Option<bool> {
        self.value
    }
}

/// Everything Alice observes during a transfer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderView {
    pub input: bool,
    /// Data returned to Alice by the functionality; the ideal box returns none.
    #[serde(default)]
    pub observed: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AonTranscript {
    pub sender: SenderView,
    pub receiver: AonOtOutcome,
}

/// One ideal transfer of `bit`; delivery is a fair coin drawn from `rng`.
pub fn ideal_aon_ot<R: Rng + ?Sized>(bit: bool, rng: &mut R) -> AonOtOutcome {
    if rng.gen_bool(0.5) {
        AonOtOutcome::delivered(bit)
    } else {
        AonOtOutcome::erased()
    }
}

/// Like [`ideal_aon_ot`], returning both parties' views.
pub fn ideal_aon_ot_transcript<R: Rng + ?Sized>(bit: bool, rng: &mut R) -> AonTranscript {
    AonTranscript {
        sender: SenderView {
            input: bit,
            observed: Vec::new(),
        },
        receiver: ideal_aon_ot(bit, rng),
    }
}

/// An all-or-nothing OT channel, used strictly through its interface.
pub trait AonOt {
    fn transfer(&mut self, bit: bool) -> AonOtOutcome;
}

/// Ideal functionality drawing each invocation's coin from its own stream.
#[derive(Clone, Debug)]
pub struct IdealAonOt {
    streams: SeedStream,
    invocations: u64,
    transcripts: Vec<AonTranscript>,
}

impl IdealAonOt {
    pub fn new(streams: SeedStream) -> Self {
        Self {
            streams,
            invocations: 0,
            transcripts: Vec::new(),
        }
    }

    pub fn invocations(&self) -> u64 {
        self.invocations
    }

    pub fn transcripts(&self) -> &[AonTranscript] {
        &self.transcripts
    }
}

impl AonOt for IdealAonOt {
    fn transfer(&mut self, bit: bool) -> AonOtOutcome {
        let mut rng = self.streams.rng_at(self.invocations);
        self.invocations += 1;
        let t = ideal_aon_ot_transcript(bit, &mut rng);
        let outcome = t.receiver;
        self.transcripts.push(t);
        outcome
    }
}

/// Channel with a fixed delivery decision, for forced-branch runs.
#[derive(Clone, Copy, Debug)]
pub struct ForcedAonOt {
    pub deliver: bool,
}

impl AonOt for ForcedAonOt {
    fn transfer(&mut self, bit: bool) -> AonOtOutcome {
        if self.deliver {
            AonOtOutcome::delivered(bit)
        } else {
            AonOtOutcome::erased()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderIgnoranceReport {
    pub transcripts: usize,
    /// Indices of transcripts whose sender view carries more than the input bit.
    pub leaking: Vec<usize>,
    pub pass: bool,
}

/// Checks that Alice's view of every transcript is just her input bit.
pub fn verify_sender_ignorance(batch: &[AonTranscript]) -> SenderIgnoranceReport {
    let leaking: Vec<usize> = batch
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.sender.observed.is_empty())
        .map(|(k, _)| k)
        .collect();
    SenderIgnoranceReport {
        transcripts: batch.len(),
        pass: leaking.is_empty(),
        leaking,
    }
}
