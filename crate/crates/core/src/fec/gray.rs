use super::FecError;

fn check(index: u32, sf: u32) -> Result<(), FecError> {
    if sf >= 32 || index >> sf != 0 {
        return Err(FecError::IndexOutOfRange { index, sf });
    }
    Ok(())
}

/// Reflected binary Gray code of an `sf`-bit symbol index.
pub fn gray_map(index: u32, sf: u32) -> Result<u32, FecError> {
    check(index, sf)?;
    Ok(index ^ (index >> 1))
}

pub fn gray_unmap(code: u32, sf: u32) -> Result<u32, FecError> {
    check(code, sf)?;
    let mut n = code;
    let mut shift = code >> 1;
    while shift != 0 {
        n ^= shift;
        shift >>= 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(gray_map(0, 5), Ok(0));
        assert_eq!(gray_map(2, 5), Ok(3));
        assert_eq!(gray_map(31, 5), Ok(16));
        assert_eq!(gray_map(32, 5), Err(FecError::IndexOutOfRange { index: 32, sf: 5 }));
        assert!(gray_unmap(40, 5).is_err());
    }

    #[test]
    fn bijective_with_unit_adjacency() {
        let mut seen = [false; 32];
        for k in 0..32 {
            let g = gray_map(k, 5).unwrap();
            assert!(!seen[g as usize]);
            seen[g as usize] = true;
            assert_eq!(gray_unmap(g, 5), Ok(k));
            if k < 31 {
                assert_eq!((g ^ gray_map(k + 1, 5).unwrap()).count_ones(), 1);
            }
        }
    }
}
