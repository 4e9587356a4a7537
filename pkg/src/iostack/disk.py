"""Mechanical disk service-time model.

Zoned geometry with track/cylinder skews and per-zone spare sectors, a
three-point seek curve, and rotational bookkeeping precise enough that a
logically sequential stream crossing a track boundary lands just behind the
head after the switch instead of losing a revolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class OutOfRange(Exception):
    """An LBA or cylinder distance falls outside the geometry."""


class Mapping(Enum):
    #: Classic CHS order: all heads of a cylinder, then the next cylinder.
    CYLINDER_MAJOR = "CYLINDER_MAJOR"
    #: Fill a whole surface before switching heads.
    SURFACE_MAJOR = "SURFACE_MAJOR"


@dataclass(frozen=True)
class Zone:
    first_cylinder: int
    sectors_per_track: int


@dataclass(frozen=True)
class DiskGeometry:
    cylinders: int
    heads: int
    zones: tuple[Zone, ...]
    rpm: int
    sector_bytes: int = 512
    track_skew_sectors: int = 0
    cylinder_skew_sectors: int = 0
    #: Sectors reserved at the tail of each zone's logical order (0 = none).
    spares_per_zone_tail: int = 0
    mapping: Mapping = Mapping.CYLINDER_MAJOR

    def __post_init__(self) -> None:
        if self.cylinders <= 0 or self.heads <= 0 or self.rpm <= 0:
            raise ValueError("cylinders, heads and rpm must be positive")
        if not self.zones or self.zones[0].first_cylinder != 0:
            raise ValueError("zones must start at cylinder 0")
        for prev, cur in zip(self.zones, self.zones[1:]):
            if cur.first_cylinder <= prev.first_cylinder:
                raise ValueError("zone first_cylinder values must be strictly increasing")
        if self.zones[-1].first_cylinder >= self.cylinders:
            raise ValueError("zone starts beyond the last cylinder")
        min_spt = min(z.sectors_per_track for z in self.zones)
        if self.track_skew_sectors >= min_spt or self.cylinder_skew_sectors >= min_spt:
            raise ValueError("skews must be smaller than every zone's sectors_per_track")
        for idx in range(len(self.zones)):
            if self.spares_per_zone_tail >= self._zone_total_sectors(idx):
                raise ValueError("spares exceed zone capacity")

    # -- zone arithmetic ---------------------------------------------------

    def _zone_cylinders(self, idx: int) -> int:
        end = self.zones[idx + 1].first_cylinder if idx + 1 < len(self.zones) else self.cylinders
        return end - self.zones[idx].first_cylinder

    def _zone_total_sectors(self, idx: int) -> int:
        return self._zone_cylinders(idx) * self.heads * self.zones[idx].sectors_per_track

    def zone_usable_sectors(self, idx: int) -> int:
        return self._zone_total_sectors(idx) - self.spares_per_zone_tail

    @property
    def usable_sectors(self) -> int:
        return sum(self.zone_usable_sectors(i) for i in range(len(self.zones)))

    @property
    def usable_bytes(self) -> int:
        return self.usable_sectors * self.sector_bytes

    @property
    def rotation_period_us(self) -> float:
        return 60_000_000 / self.rpm

    def zone_of_cylinder(self, cylinder: int) -> int:
        if not 0 <= cylinder < self.cylinders:
            raise OutOfRange(f"cylinder {cylinder} outside [0, {self.cylinders})")
        idx = 0
        for i, z in enumerate(self.zones):
            if z.first_cylinder > cylinder:
                break
            idx = i
        return idx

    def sectors_per_track_at(self, cylinder: int) -> int:
        return self.zones[self.zone_of_cylinder(cylinder)].sectors_per_track

    def _zone_of_lba(self, lba: int) -> tuple[int, int]:
        """Zone index and the LBA where that zone starts."""

        if lba < 0:
            raise OutOfRange(f"lba {lba} is negative")
        start = 0
        for idx in range(len(self.zones)):
            usable = self.zone_usable_sectors(idx)
            if lba < start + usable:
                return idx, start
            start += usable
        raise OutOfRange(f"lba {lba} beyond usable capacity {start}")

    def _track_skew_offset(self, zone_track: int, zone_cylinders: int) -> int:
        """Rotational offset of logical sector 0 for a track of the zone.

        Skew accumulates along the mapping order: every head switch adds the
        track skew, every cylinder step adds the cylinder skew, so a
        sequential transfer resumes just behind the head after each switch.
        """

        if self.mapping is Mapping.CYLINDER_MAJOR:
            cylinder_steps = zone_track // self.heads
            head_switches = zone_track - cylinder_steps
        else:
            head_switches = zone_track // zone_cylinders
            cylinder_steps = zone_track - head_switches
        return (
            head_switches * self.track_skew_sectors
            + cylinder_steps * self.cylinder_skew_sectors
        )

    def _track_geometry(self, zone_idx: int, zone_track: int) -> tuple[int, int]:
        """(cylinder, head) of the zone-relative track index."""

        z = self.zones[zone_idx]
        zc = self._zone_cylinders(zone_idx)
        if self.mapping is Mapping.CYLINDER_MAJOR:
            return z.first_cylinder + zone_track // self.heads, zone_track % self.heads
        return z.first_cylinder + zone_track % zc, zone_track // zc


def lba_to_phys(lba: int, geometry: DiskGeometry) -> tuple[int, int, int]:
    """Map a logical block address to (cylinder, head, physical sector).

    Bijective onto the non-spare sectors: spare slots sit at the tail of
    each zone's logical order and are never assigned an address.
    """

    zone_idx, zone_start = geometry._zone_of_lba(lba)
    z = geometry.zones[zone_idx]
    slot = lba - zone_start
    track = slot // z.sectors_per_track
    logical_sector = slot % z.sectors_per_track
    cylinder, head = geometry._track_geometry(zone_idx, track)
    skew = geometry._track_skew_offset(track, geometry._zone_cylinders(zone_idx))
    physical = (logical_sector + skew) % z.sectors_per_track
    return cylinder, head, physical


@dataclass(frozen=True)
class SeekProfile:
    """(distance 1, average, full stroke) seek times per direction of use."""

    read_min_us: float
    read_avg_us: float
    read_max_us: float
    write_min_us: float
    write_avg_us: float
    write_max_us: float
    head_switch_us: float = 0.0

    def triple(self, write: bool) -> tuple[float, float, float]:
        if write:
            return self.write_min_us, self.write_avg_us, self.write_max_us
        return self.read_min_us, self.read_avg_us, self.read_max_us

    def __post_init__(self) -> None:
        for write in (False, True):
            lo, mid, hi = self.triple(write)
            if not lo <= mid <= hi:
                raise ValueError("seek profile requires min <= avg <= max")


def seek_time(
    distance_cylinders: int, profile: SeekProfile, cylinders: int, write: bool = False
) -> float:
    """Seek cost in microseconds for a cylinder distance.

    Square-root rise up to the knee, affine beyond it; the average point is
    anchored at one third of the stroke, so the published (min, avg, max)
    triple is reproduced exactly and the curve stays monotone.
    """

    if not 0 <= distance_cylinders < cylinders:
        raise OutOfRange(f"seek distance {distance_cylinders} outside [0, {cylinders})")
    if distance_cylinders == 0:
        return 0.0
    lo, mid, hi = profile.triple(write)
    full = cylinders - 1
    knee = cylinders / 3
    if knee <= 1.0 or mid <= lo or hi < mid or full <= knee:
        # Degenerate profile or tiny geometry: fall back to a straight line.
        if full <= 1:
            return lo
        return lo + (hi - lo) * (distance_cylinders - 1) / (full - 1)
    if distance_cylinders <= knee:
        b = (mid - lo) / (math.sqrt(knee) - 1.0)
        return (lo - b) + b * math.sqrt(distance_cylinders)
    return mid + (hi - mid) * (distance_cylinders - knee) / (full - knee)


@dataclass(frozen=True)
class HeadState:
    """Head position plus the rotational phase at a reference time."""

    cylinder: int = 0
    head: int = 0
    angle_revs: float = 0.0
    time_us: float = 0.0

    def angle_at(self, t_us: float, period_us: float) -> float:
        return (self.angle_revs + (t_us - self.time_us) / period_us) % 1.0

    def angle_sectors(self, geometry: DiskGeometry, t_us: float) -> float:
        """Rotational position in sector units of the current zone's tracks."""

        spt = geometry.sectors_per_track_at(self.cylinder)
        return self.angle_at(t_us, geometry.rotation_period_us) * spt


def rotational_wait(
    target_sector: int, spt: int, state: HeadState, arrival_us: float, period_us: float
) -> float:
    """Microseconds until the target physical sector reaches the head.

    A sector that is mathematically exactly under the head must wait zero,
    not a full revolution; the epsilon absorbs float noise from the angle
    arithmetic (1e-9 of a revolution is far below one sector).
    """

    target_angle = (target_sector % spt) / spt
    current = state.angle_at(arrival_us, period_us)
    wait_revs = (target_angle - current) % 1.0
    if wait_revs > 1.0 - 1e-9:
        wait_revs = 0.0
    return wait_revs * period_us


def _track_runs(lba: int, sectors: int, geometry: DiskGeometry):
    """Split an LBA range into per-track runs of logical sectors."""

    remaining = sectors
    while remaining > 0:
        zone_idx, zone_start = geometry._zone_of_lba(lba)
        z = geometry.zones[zone_idx]
        slot = lba - zone_start
        track = slot // z.sectors_per_track
        logical = slot % z.sectors_per_track
        run = min(remaining, z.sectors_per_track - logical)
        run = min(run, geometry.zone_usable_sectors(zone_idx) - slot)
        yield zone_idx, track, logical, run
        lba += run
        remaining -= run


def service(
    lba: int,
    sectors: int,
    state: HeadState,
    geometry: DiskGeometry,
    profile: SeekProfile,
    arrival_us: float,
    write: bool = False,
) -> tuple[float, HeadState]:
    """Serve one media access; returns (completion delay, new head state).

    The delay composes seek, head-switch, rotational wait and transfer track
    by track.  The platter keeps rotating during seeks and switches, so with
    skews matched to the switch costs a sequential multi-track transfer
    incurs no extra revolution.
    """

    if sectors <= 0:
        raise OutOfRange("sectors must be positive")
    if lba + sectors > geometry.usable_sectors:
        raise OutOfRange(
            f"range [{lba}, {lba + sectors}) beyond usable {geometry.usable_sectors} sectors"
        )
    period = geometry.rotation_period_us
    t = float(arrival_us)
    pos = state
    for zone_idx, track, logical, run in _track_runs(lba, sectors, geometry):
        z = geometry.zones[zone_idx]
        cylinder, head = geometry._track_geometry(zone_idx, track)
        if cylinder != pos.cylinder:
            # Head selection settles within the arm move.
            t += seek_time(abs(cylinder - pos.cylinder), profile, geometry.cylinders, write)
        elif head != pos.head:
            t += profile.head_switch_us
        skew = geometry._track_skew_offset(track, geometry._zone_cylinders(zone_idx))
        phys_start = (logical + skew) % z.sectors_per_track
        pos = replace(pos, cylinder=cylinder, head=head)
        t += rotational_wait(phys_start, z.sectors_per_track, pos, t, period)
        t += run / z.sectors_per_track * period
        end_angle = ((phys_start + run) % z.sectors_per_track) / z.sectors_per_track
        pos = HeadState(cylinder, head, end_angle, t)
    return t - arrival_us, pos


def cylinder_of_byte(disk_byte_addr: int, geometry: DiskGeometry) -> int:
    """Cylinder holding the first sector of a byte address (clipped in range)."""

    lba = min(disk_byte_addr // geometry.sector_bytes, geometry.usable_sectors - 1)
    return lba_to_phys(lba, geometry)[0]
