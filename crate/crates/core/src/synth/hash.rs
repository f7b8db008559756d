use std::collections::HashMap;

use crate::text::Phone;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub const MIN_HZ: u32 = 100;
pub const MAX_HZ: u32 = 400;

/// Base frequency of every phone: `100 + fnv1a64(symbol) mod 301` Hz, with
/// collisions moved up one hertz at a time (wrapping 400 → 100) in symbol
/// table order so that no two phones share a frequency.
#[derive(Debug, Clone)]
pub struct PhoneFrequencies {
    hz: HashMap<Phone, u32>,
}

impl PhoneFrequencies {
    pub fn new() -> Self {
        let mut taken = [false; (MAX_HZ + 1) as usize];
        let mut hz = HashMap::new();
        for phone in Phone::all() {
            let mut f = Self::raw(phone);
            while taken[f as usize] {
                f = if f == MAX_HZ { MIN_HZ } else { f + 1 };
            }
            taken[f as usize] = true;
            hz.insert(phone, f);
        }
        Self { hz }
    }

    /// Frequency before collision resolution.
    pub fn raw(phone: Phone) -> u32 {
        MIN_HZ + (fnv1a64(phone.symbol().as_bytes()) % (MAX_HZ - MIN_HZ + 1) as u64) as u32
    }

    pub fn get(&self, phone: Phone) -> u32 {
        self.hz[&phone]
    }
}

impl Default for PhoneFrequencies {
    fn default() -> Self {
        Self::new()
    }
}
