//! Mixed-radix joint indices. Copy 1 is the least significant digit, so the
//! joint index of copies `1..k` is the full index modulo the product of the
//! first `k` radices.

/// Encodes `digits` (copy 1 first) against `radices`.
pub fn encode(digits: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(digits.len(), radices.len());
    let mut index = 0;
    let mut weight = 1;
    for (&d, &r) in digits.iter().zip(radices) {
        debug_assert!(d < r);
        index += d * weight;
        weight *= r;
    }
    index
}

/// Decodes a joint index into per-copy digits (copy 1 first).
pub fn decode(mut index: usize, radices: &[usize]) -> Vec<usize> {
    radices
        .iter()
        .map(|&r| {
            let d = index % r;
            index /= r;
            d
        })
        .collect()
}

/// Digit of copy `k` (0-based) inside a joint index.
pub fn digit(index: usize, radices: &[usize], k: usize) -> usize {
    let weight: usize = radices[..k].iter().product();
    (index / weight) % radices[k]
}

pub fn size(radices: &[usize]) -> usize {
    radices.iter().product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_one_is_least_significant() {
        assert_eq!(encode(&[1, 0], &[2, 3]), 1);
        assert_eq!(encode(&[0, 1], &[2, 3]), 2);
        assert_eq!(encode(&[1, 2], &[2, 3]), 5);
        assert_eq!(decode(5, &[2, 3]), vec![1, 2]);
        assert_eq!(digit(5, &[2, 3], 1), 2);
    }

    #[test]
    fn prefix_is_modulo() {
        let radices = [3, 2, 4];
        for idx in 0..size(&radices) {
            let digits = decode(idx, &radices);
            assert_eq!(idx % 3, encode(&digits[..1], &radices[..1]));
            assert_eq!(idx % 6, encode(&digits[..2], &radices[..2]));
            assert_eq!(encode(&digits, &radices), idx);
        }
    }
}
