//! Coding a bit string into the character of an equivalence structure.
//!
//! Block `i` owns `2i + 4` consecutive elements `a^i_0, …, a^i_{2i+3}`. The
//! first `2i + 3` are always equivalent; the last joins them iff bit `i` is
//! set. Joined blocks have even size and split blocks odd size, so the
//! character determines every bit.

use crate::eqrel::{Card, Character, Partition};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    bits: Vec<bool>,
    partition: Partition,
}

/// Index of `a^i_k`: blocks before `i` use `i² + 3i` elements.
pub fn block_element(i: usize, k: usize) -> usize {
    i * i + 3 * i + k
}

impl BlockStructure {
    pub fn n_blocks(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn character(&self) -> Character {
        self.partition.character()
    }
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::input(format!(
                "bit strings use only 0 and 1, found {c:?}"
            ))),
        })
        .collect()
}

fn prefix(x: &[bool], n: usize) -> Result<&[bool]> {
    x.get(..n).ok_or_else(|| {
        Error::input(format!(
            "{n} blocks requested but only {} bits given",
            x.len()
        ))
    })
}

pub fn encode_blocks(x: &[bool], n: usize) -> Result<BlockStructure> {
    let bits = prefix(x, n)?.to_vec();
    let mut partition = Partition::identity(block_element(n, 0));
    for (i, &bit) in bits.iter().enumerate() {
        let head = block_element(i, 0);
        let last = if bit { 2 * i + 3 } else { 2 * i + 2 };
        for k in 1..=last {
            partition.merge(head, block_element(i, k))?;
        }
    }
    Ok(BlockStructure { bits, partition })
}

/// The character read off directly: `2i+4` for set bits, `2i+3` plus one
/// singleton for clear bits.
pub fn block_character(x: &[bool], n: usize) -> Result<Character> {
    let bits = prefix(x, n)?;
    let mut ch = Character::new();
    for (i, &bit) in bits.iter().enumerate() {
        if bit {
            ch.add(Card::Finite(2 * i as u64 + 4), 1);
        } else {
            ch.add(Card::Finite(2 * i as u64 + 3), 1);
            ch.add(Card::Finite(1), 1);
        }
    }
    Ok(ch)
}

pub fn decode_character(ch: &Character, n: usize) -> Result<Vec<bool>> {
    (0..n as u64)
        .map(|i| match (ch.has_size(2 * i + 4), ch.has_size(2 * i + 3)) {
            (true, false) => Ok(true),
            (false, true) => Ok(false),
            (joined, split) => Err(Error::format(format!(
                "block {i}: expected exactly one of sizes {} and {}, found {}",
                2 * i + 4,
                2 * i + 3,
                match (joined, split) {
                    (true, true) => "both",
                    _ => "neither",
                }
            ))),
        })
        .collect()
}

/// Block count implied by a character: one class of size ≥ 3 per block.
pub fn inferred_blocks(ch: &Character) -> usize {
    ch.entries()
        .filter(|(size, _)| matches!(size, Card::Finite(s) if *s >= 3))
        .count()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
