use alloc::vec::Vec;

/// Values on a contiguous run of calendar years.
#[derive(Debug, Clone, PartialEq)]
pub struct YearSeries {
    first_year: i32,
    values: Vec<f64>,
}

impl YearSeries {
    pub fn new(first_year: i32, values: Vec<f64>) -> Self {
        Self { first_year, values }
    }

    /// Builds a series from `(year, value)` pairs. Returns `None` when the
    /// years are empty or not contiguous and increasing.
    pub fn from_pairs(pairs: &[(i32, f64)]) -> Option<Self> {
        let first = pairs.first()?.0;
        for (i, (year, _)) in pairs.iter().enumerate() {
            if *year != first + i as i32 {
                return None;
            }
        }
        Some(Self::new(first, pairs.iter().map(|p| p.1).collect()))
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.values.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        if year < self.first_year {
            return None;
        }
        self.values.get((year - self.first_year) as usize).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.first_year + i as i32, *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lookup_and_bounds() {
        let s = YearSeries::new(2020, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.get(2019), None);
        assert_eq!(s.get(2021), Some(2.0));
        assert_eq!(s.get(2023), None);
        assert_eq!(s.last_year(), 2022);
    }

    #[test]
    fn from_pairs_rejects_gaps() {
        assert!(YearSeries::from_pairs(&[(2000, 1.0), (2002, 2.0)]).is_none());
        assert!(YearSeries::from_pairs(&[]).is_none());
        let s = YearSeries::from_pairs(&[(2000, 1.0), (2001, 2.0)]).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(2000, 1.0), (2001, 2.0)]);
    }
}
