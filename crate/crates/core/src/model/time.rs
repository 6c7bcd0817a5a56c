use std::fmt;

/// A time point of the calendar. Integers, granularity-agnostic.
pub type TimePoint = i64;

/// Calendars larger than this are rejected; every semantic operation
/// enumerates the calendar.
pub const MAX_CALENDAR_POINTS: u64 = 1 << 20;

/// The finite set of valid time points, declared as an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Calendar {
    first: TimePoint,
    last: TimePoint,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalendarError {
    #[error("calendar {0}..{1} is empty")]
    Empty(TimePoint, TimePoint),
    #[error("calendar {0}..{1} exceeds {MAX_CALENDAR_POINTS} points")]
    TooLarge(TimePoint, TimePoint),
}

impl Calendar {
    pub fn range(first: TimePoint, last: TimePoint) -> Result<Self, CalendarError> {
        if first > last {
            return Err(CalendarError::Empty(first, last));
        }
        let span = (last as i128 - first as i128) as u128 + 1;
        if span > MAX_CALENDAR_POINTS as u128 {
            return Err(CalendarError::TooLarge(first, last));
        }
        Ok(Calendar { first, last })
    }

    pub fn first(&self) -> TimePoint {
        self.first
    }

    pub fn last(&self) -> TimePoint {
        self.last
    }

    pub fn len(&self) -> usize {
        (self.last - self.first) as usize + 1
    }

    /// Always false; calendars are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        self.first <= t && t <= self.last
    }

    pub fn points(&self) -> impl DoubleEndedIterator<Item = TimePoint> + Clone {
        self.first..=self.last
    }
}

impl fmt::Display for Calendar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.first, self.last)
    }
}
