//! Standard MIDI File (format 0 and 1) reading, plus a minimal format-0 writer.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{Point, PointSet};
use crate::time::Time;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TrackSelect {
    /// The track with the most sounding note-on events; lowest index wins ties.
    #[default]
    Densest,
    Index(usize),
    /// Every track merged into one piece.
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MidiOptions {
    pub track: TrackSelect,
    /// Reject pieces whose notes overlap in time.
    pub monophonic: bool,
}

struct Track {
    notes: Vec<Point>,
    note_ons: usize,
    name: Option<String>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, at: usize, message: impl Into<String>) -> Error {
        Error::Midi { offset: at, message: message.into() }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(self.err(self.pos, format!("unexpected end of data, wanted {n} bytes")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self) -> Result<u32> {
        let start = self.pos;
        let mut value: u32 = 0;
        for _ in 0..4 {
            let b = self.u8()?;
            value = (value << 7) | u32::from(b & 0x7f);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(self.err(start, "variable-length quantity longer than 4 bytes"))
    }
}

pub fn parse_midi(bytes: &[u8], options: &MidiOptions) -> Result<PointSet> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4).map_err(|_| r.err(0, "file too short for a header"))? != b"MThd" {
        return Err(r.err(0, "missing MThd header"));
    }
    let header_len = r.u32()? as usize;
    if header_len < 6 {
        return Err(r.err(4, format!("header length {header_len} < 6")));
    }
    let format = r.u16()?;
    let declared_tracks = r.u16()?;
    let division_at = r.pos;
    let division = r.u16()?;
    r.take(header_len - 6)?;
    if division & 0x8000 != 0 {
        return Err(Error::Unsupported("SMPTE time division".into()));
    }
    if division == 0 {
        return Err(r.err(division_at, "ticks per quarter note is zero"));
    }
    if format > 1 {
        return Err(Error::Unsupported(format!("SMF format {format}")));
    }

    let mut tracks = Vec::new();
    while r.pos < bytes.len() {
        let chunk_at = r.pos;
        let kind = r.take(4)?;
        let len = r.u32()? as usize;
        if r.pos + len > bytes.len() {
            return Err(r.err(chunk_at, format!("chunk length {len} runs past end of file")));
        }
        if kind == b"MTrk" {
            let end = r.pos + len;
            tracks.push(parse_track(&mut r, end, i64::from(division))?);
            r.pos = end;
        } else {
            r.pos += len;
        }
    }
    if tracks.len() < declared_tracks as usize {
        log::warn!("header declares {declared_tracks} tracks, found {}", tracks.len());
    }

    let chosen: Vec<Track> = match options.track {
        TrackSelect::All => tracks,
        TrackSelect::Index(i) => {
            if i >= tracks.len() {
                return Err(Error::InvalidArgument(format!(
                    "track {i} requested but file has {} tracks",
                    tracks.len()
                )));
            }
            vec![tracks.swap_remove(i)]
        }
        TrackSelect::Densest => {
            let best = tracks
                .iter()
                .enumerate()
                .max_by(|(ia, a), (ib, b)| a.note_ons.cmp(&b.note_ons).then(ib.cmp(ia)))
                .map(|(i, _)| i);
            match best {
                Some(i) => vec![tracks.swap_remove(i)],
                None => Vec::new(),
            }
        }
    };
    let title = chosen.iter().find_map(|t| t.name.clone());
    let mut ps = PointSet::new(chosen.into_iter().flat_map(|t| t.notes).collect());
    ps.title = title;
    if options.monophonic {
        ps.check_monophonic()?;
    }
    Ok(ps)
}

fn parse_track(r: &mut Reader<'_>, end: usize, tpq: i64) -> Result<Track> {
    let mut tick: i64 = 0;
    let mut running: Option<u8> = None;
    let mut pending: BTreeMap<(u8, u8), VecDeque<i64>> = BTreeMap::new();
    let mut notes = Vec::new();
    let mut note_ons = 0;
    let mut name = None;
    let to_time = |t: i64| Time::new(t, tpq);

    while r.pos < end {
        tick += i64::from(r.vlq()?);
        let event_at = r.pos;
        let first = r.u8()?;
        let (status, first_data) = if first & 0x80 != 0 {
            (first, None)
        } else {
            match running {
                Some(s) => (s, Some(first)),
                None => return Err(r.err(event_at, "data byte with no running status")),
            }
        };
        match status {
            0xff => {
                running = None;
                let kind = r.u8()?;
                let len = r.vlq()? as usize;
                let data = r.take(len)?;
                match kind {
                    0x03 if name.is_none() => name = Some(String::from_utf8_lossy(data).into_owned()),
                    0x2f => break,
                    _ => {}
                }
            }
            0xf0 | 0xf7 => {
                running = None;
                let len = r.vlq()? as usize;
                r.take(len)?;
            }
            0x80..=0xef => {
                running = Some(status);
                let kind = status & 0xf0;
                let channel = status & 0x0f;
                let d1 = match first_data {
                    Some(d) => d,
                    None => r.u8()?,
                };
                if d1 & 0x80 != 0 {
                    return Err(r.err(event_at, "status byte where data byte expected"));
                }
                if kind == 0xc0 || kind == 0xd0 {
                    continue;
                }
                let d2 = r.u8()?;
                if d2 & 0x80 != 0 {
                    return Err(r.err(event_at, "status byte where data byte expected"));
                }
                let on = kind == 0x90 && d2 > 0;
                let off = kind == 0x80 || (kind == 0x90 && d2 == 0);
                if on {
                    note_ons += 1;
                    pending.entry((channel, d1)).or_default().push_back(tick);
                } else if off {
                    let start = pending
                        .get_mut(&(channel, d1))
                        .and_then(VecDeque::pop_front)
                        .ok_or_else(|| {
                            r.err(event_at, format!("note-off for pitch {d1} with no sounding note"))
                        })?;
                    if tick > start {
                        notes.push(Point { onset: to_time(start), pitch: d1, duration: to_time(tick - start) });
                    }
                }
            }
            _ => return Err(r.err(event_at, format!("unsupported status byte 0x{status:02x}"))),
        }
    }
    for ((_, pitch), starts) in pending {
        for start in starts {
            if tick > start {
                notes.push(Point { onset: to_time(start), pitch, duration: to_time(tick - start) });
            }
        }
    }
    Ok(Track { notes, note_ons, name })
}

/// Encodes a piece as a format-0 file; every onset and duration must fall on a tick.
pub fn write_smf(ps: &PointSet, ticks_per_quarter: u16) -> Result<Vec<u8>> {
    if ticks_per_quarter == 0 || ticks_per_quarter & 0x8000 != 0 {
        return Err(Error::InvalidArgument(format!("bad ticks per quarter {ticks_per_quarter}")));
    }
    let tpq = Time::from_int(i64::from(ticks_per_quarter));
    let ticks = |t: Time| -> Result<i64> {
        let r = t.ratio() * tpq.ratio();
        if !r.is_integer() || r < num_rational::Ratio::from_integer(0) {
            return Err(Error::InvalidArgument(format!("time {t} is not on the tick grid")));
        }
        Ok(r.to_integer())
    };
    // (tick, 0 = off / 1 = on, pitch)
    let mut events = Vec::with_capacity(ps.len() * 2);
    for p in ps.points() {
        events.push((ticks(p.onset)?, 1u8, p.pitch));
        events.push((ticks(p.end())?, 0u8, p.pitch));
    }
    events.sort();

    let mut track = Vec::new();
    let mut last = 0;
    for (tick, on, pitch) in events {
        push_vlq(&mut track, (tick - last) as u32);
        last = tick;
        if on == 1 {
            track.extend_from_slice(&[0x90, pitch, 64]);
        } else {
            track.extend_from_slice(&[0x80, pitch, 0]);
        }
    }
    track.extend_from_slice(&[0x00, 0xff, 0x2f, 0x00]);

    let mut out = Vec::with_capacity(track.len() + 22);
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&0u16.to_be_bytes());
    out.extend_from_slice(&1u16.to_be_bytes());
    out.extend_from_slice(&ticks_per_quarter.to_be_bytes());
    out.extend_from_slice(b"MTrk");
    out.extend_from_slice(&(track.len() as u32).to_be_bytes());
    out.extend_from_slice(&track);
    Ok(out)
}

pub(crate) fn push_vlq(buf: &mut Vec<u8>, mut value: u32) {
    let mut stack = [0u8; 5];
    let mut n = 0;
    loop {
        stack[n] = (value & 0x7f) as u8;
        n += 1;
        value >>= 7;
        if value == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        buf.push(if i > 0 { stack[i] | 0x80 } else { stack[i] });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(format: u16, ntrks: u16, division: u16) -> Vec<u8> {
        let mut v = b"MThd".to_vec();
        v.extend_from_slice(&6u32.to_be_bytes());
        v.extend_from_slice(&format.to_be_bytes());
        v.extend_from_slice(&ntrks.to_be_bytes());
        v.extend_from_slice(&division.to_be_bytes());
        v
    }

    fn track(events: &[u8]) -> Vec<u8> {
        let mut v = b"MTrk".to_vec();
        v.extend_from_slice(&(events.len() as u32).to_be_bytes());
        v.extend_from_slice(events);
        v
    }

    #[test]
    fn single_crotchet_at_division_480() {
        let mut file = header(0, 1, 480);
        // delta 0 note-on 60; delta 480 (0x83 0x60) note-off; end of track
        file.extend(track(&[0x00, 0x90, 60, 100, 0x83, 0x60, 0x80, 60, 0, 0x00, 0xff, 0x2f, 0x00]));
        let ps = parse_midi(&file, &MidiOptions::default()).unwrap();
        assert_eq!(ps.points(), &[Point::crotchet(0, 60)]);
    }

    #[test]
    fn empty_track_list_gives_empty_piece() {
        let ps = parse_midi(&header(1, 0, 96), &MidiOptions::default()).unwrap();
        assert!(ps.is_empty());
    }

    #[test]
    fn velocity_zero_before_note_on_is_dangling() {
        let mut file = header(0, 1, 96);
        file.extend(track(&[0x00, 0x90, 60, 0, 0x00, 0xff, 0x2f, 0x00]));
        match parse_midi(&file, &MidiOptions::default()) {
            Err(Error::Midi { offset, .. }) => assert_eq!(offset, 14 + 8 + 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn running_status_and_velocity_zero_off() {
        let mut file = header(0, 1, 2);
        // note-on 60, running-status vel-0 off after 1 tick, running-status note-on 62, off after 2 ticks
        file.extend(track(&[0x00, 0x90, 60, 90, 0x01, 60, 0, 0x00, 62, 90, 0x02, 62, 0]));
        let ps = parse_midi(&file, &MidiOptions::default()).unwrap();
        assert_eq!(
            ps.points(),
            &[
                Point::new(Time::ZERO, 60, Time::new(1, 2)).unwrap(),
                Point::new(Time::new(1, 2), 62, Time::ONE).unwrap(),
            ]
        );
    }

    #[test]
    fn smpte_and_format_2_are_unsupported() {
        assert!(matches!(parse_midi(&header(0, 0, 0xe728), &MidiOptions::default()), Err(Error::Unsupported(_))));
        assert!(matches!(parse_midi(&header(2, 0, 96), &MidiOptions::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn malformed_chunk_reports_offset() {
        let mut file = header(0, 1, 96);
        file.extend_from_slice(b"MTrk");
        file.extend_from_slice(&100u32.to_be_bytes());
        file.extend_from_slice(&[0x00, 0x90]);
        match parse_midi(&file, &MidiOptions::default()) {
            Err(Error::Midi { offset, .. }) => assert_eq!(offset, 14),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_midi(b"RIFF", &MidiOptions::default()), Err(Error::Midi { offset: 0, .. })));
    }

    #[test]
    fn densest_track_and_monophony() {
        let mut file = header(1, 2, 1);
        file.extend(track(&[0x00, 0x90, 40, 90, 0x01, 0x80, 40, 0]));
        // two overlapping notes
        file.extend(track(&[0x00, 0x90, 60, 90, 0x00, 0x90, 64, 90, 0x02, 0x80, 60, 0, 0x00, 0x80, 64, 0]));
        let ps = parse_midi(&file, &MidiOptions::default()).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.points()[0].pitch, 60);
        let mono = MidiOptions { monophonic: true, ..Default::default() };
        assert!(matches!(parse_midi(&file, &mono), Err(Error::MonophonyViolation { .. })));
        let first = MidiOptions { track: TrackSelect::Index(0), monophonic: true };
        assert_eq!(parse_midi(&file, &first).unwrap().points()[0].pitch, 40);
        let all = MidiOptions { track: TrackSelect::All, ..Default::default() };
        assert_eq!(parse_midi(&file, &all).unwrap().len(), 3);
    }

    #[test]
    fn writer_round_trips() {
        let ps = PointSet::new(vec![
            Point::crotchet(0, 60),
            Point::new(Time::new(3, 2), 67, Time::new(1, 4)).unwrap(),
            Point::crotchet(4, 72),
        ]);
        let bytes = write_smf(&ps, 480).unwrap();
        assert_eq!(parse_midi(&bytes, &MidiOptions::default()).unwrap().points(), ps.points());
        let off_grid = PointSet::new(vec![Point::new(Time::new(1, 3), 60, Time::ONE).unwrap()]);
        assert!(write_smf(&off_grid, 4).is_err());
    }

    #[test]
    fn vlq_encoding() {
        for (v, bytes) in [(0u32, vec![0u8]), (0x7f, vec![0x7f]), (0x80, vec![0x81, 0x00]), (480, vec![0x83, 0x60])] {
            let mut b = Vec::new();
            push_vlq(&mut b, v);
            assert_eq!(b, bytes);
        }
    }
}
