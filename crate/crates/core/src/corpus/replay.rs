use super::{Article, StreamWindow, Timestamp, Timestamped, Tweet};

/// The contiguous run of a time-sorted slice that falls inside `window`.
pub fn replay_filter<'a, T: Timestamped>(items: &'a [T], window: &StreamWindow) -> &'a [T] {
    let lo = items.partition_point(|x| x.timestamp() < window.start);
    let hi = items.partition_point(|x| x.timestamp() < window.end);
    &items[lo..hi.max(lo)]
}

/// Articles and tweets with timestamps in `[window.start, window.end)`.
///
/// Both inputs must be sorted by timestamp.
pub fn replay<'a>(articles: &'a [Article], tweets: &'a [Tweet], window: &StreamWindow) -> (&'a [Article], &'a [Tweet]) {
    (replay_filter(articles, window), replay_filter(tweets, window))
}

/// Consecutive UTC days covering `[first, last]`.
pub fn daily_windows(first: Timestamp, last: Timestamp) -> Vec<StreamWindow> {
    let mut windows = Vec::new();
    let mut day = StreamWindow::day(first);
    while day.start <= last {
        let next = day.end;
        windows.push(day);
        day = StreamWindow::day(next);
    }
    windows
}
