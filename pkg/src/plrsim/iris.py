"""Image-based iris deformation.

Points in the iris ring keep their fractional position between the pupil
border and the iris border along rays from the pupil centre. The ring is
drawn as a triangle strip with one spoke every 5 degrees; when the pupil
changes size only the inner ring of vertices moves, and texture
coordinates never change.

Geometry is in mm. Image/viewport convention: a point (X, Y) mm lands at
continuous pixel position ``(W/2 + X/mm_per_px, H/2 + Y/mm_per_px)``, with
pixel (row i, col j) centred at ``(j + 0.5, i + 0.5)``.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from PIL import Image

from .errors import DomainError

SPOKE_STEP_DEG = 5.0
N_SPOKES = int(round(360.0 / SPOKE_STEP_DEG))
MAX_PUPIL_OFFSET = 0.2

_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class IrisGeometry:
    """Pupil and iris circles in mm."""

    iris_center: tuple = (0.0, 0.0)
    iris_radius: float = 6.0
    pupil_center: tuple = (0.0, 0.0)
    pupil_diameter: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "iris_center", tuple(map(float, self.iris_center)))
        object.__setattr__(self, "pupil_center", tuple(map(float, self.pupil_center)))
        if not self.iris_radius > 0:
            raise DomainError("iris radius must be positive")
        if not 1.9 < self.pupil_diameter < 7.9:
            raise DomainError(
                f"pupil diameter {self.pupil_diameter} mm outside (1.9, 7.9)")
        off = math.dist(self.iris_center, self.pupil_center)
        if off > MAX_PUPIL_OFFSET * self.iris_radius * (1 + 1e-12):
            raise DomainError(
                f"pupil offset {off:.4g} mm exceeds 20% of the iris radius")
        if not off + self.pupil_diameter / 2 < self.iris_radius:
            raise DomainError("pupil circle is not strictly inside the iris")

    def with_pupil_diameter(self, diameter):
        return replace(self, pupil_diameter=diameter)

    def iris_exit(self, directions):
        """Distance from the pupil centre to the iris circle along unit
        `directions` (shape (..., 2))."""
        d = np.asarray(directions, dtype=float)
        w = np.subtract(self.pupil_center, self.iris_center)
        b = d @ w
        c = w @ w - self.iris_radius ** 2
        return -b + np.sqrt(b * b - c)


@dataclass(frozen=True)
class IrisTexture:
    """RGB iris photograph plus the circles it was photographed with.

    ``reference`` is in mm with the origin at the image centre;
    ``mm_per_px`` is the photograph's scale.
    """

    image: np.ndarray
    reference: IrisGeometry
    mm_per_px: float

    def __post_init__(self):
        img = np.asarray(self.image)
        if img.ndim == 2:
            img = np.repeat(img[:, :, None], 3, axis=2)
        if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
            raise ValueError("texture must be an 8-bit RGB image")
        if not self.mm_per_px > 0:
            raise ValueError("mm_per_px must be positive")
        object.__setattr__(self, "image", img)

    @property
    def shape(self):
        return self.image.shape[:2]

    def to_uv(self, points_mm):
        h, w = self.shape
        p = np.asarray(points_mm, dtype=float)
        x = w / 2 + p[..., 0] / self.mm_per_px
        y = h / 2 + p[..., 1] / self.mm_per_px
        return np.stack([x / w, y / h], axis=-1)

    @classmethod
    def load(cls, path, pupil_diameter=2.5, iris_px_diameter=None):
        """Read a PPM/PGM (or any Pillow-readable) texture.

        The iris is assumed centred in the image with a concentric pupil;
        `iris_px_diameter` defaults to the shorter image side.
        """
        img = np.asarray(Image.open(path).convert("RGB"))
        if iris_px_diameter is None:
            iris_px_diameter = min(img.shape[:2])
        ref = IrisGeometry(pupil_diameter=pupil_diameter)
        return cls(img, ref, 2 * ref.iris_radius / iris_px_diameter)


def _ray(p, g):
    v = np.subtract(p, g.pupil_center)
    dist = math.hypot(v[0], v[1])
    if dist < 1e-12:
        raise DomainError("point coincides with the pupil centre; ray undefined")
    u = v / dist
    return u, dist, float(g.iris_exit(u))


def radial_ratio(p, g):
    """Fraction of the way from pupil border to iris border, along the ray
    from the pupil centre through `p`. 0 on the pupil border, 1 on the iris
    border."""
    _, dist, exit_ = _ray(p, g)
    r = g.pupil_diameter / 2
    rho = (dist - r) / (exit_ - r)
    if rho < -_RATIO_TOL or rho > 1 + _RATIO_TOL:
        raise DomainError(f"point {tuple(p)} lies outside the iris ring")
    return min(max(rho, 0.0), 1.0)


def _same_frame(a, b):
    return (a.iris_center == b.iris_center and a.iris_radius == b.iris_radius
            and a.pupil_center == b.pupil_center)


def map_point(p, g_from, g_to):
    """Move `p` to the point with the same radial ratio after the pupil
    changes from ``g_from.pupil_diameter`` to ``g_to.pupil_diameter``."""
    if not _same_frame(g_from, g_to):
        raise DomainError("map_point needs identical iris circle and pupil centre")
    rho = radial_ratio(p, g_from)
    u, _, exit_ = _ray(p, g_from)
    r = g_to.pupil_diameter / 2
    return np.asarray(g_to.pupil_center) + (r + rho * (exit_ - r)) * u


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class IrisMesh:
    """Triangle-strip ring mesh.

    Vertex ``2*i`` is on the inner (pupil) ring and ``2*i + 1`` on the outer
    (iris) ring of spoke i; ``directions[i]`` is the spoke's unit vector.
    """

    positions: np.ndarray
    uv: np.ndarray
    triangles: np.ndarray
    directions: np.ndarray = field(repr=False)

    @property
    def inner(self):
        return self.positions[0::2]

    @property
    def outer(self):
        return self.positions[1::2]


def _strip_triangles(n):
    tris = []
    for i in range(n):
        j = (i + 1) % n
        tris.append((2 * i, 2 * i + 1, 2 * j + 1))
        tris.append((2 * i, 2 * j + 1, 2 * j))
    return np.array(tris, dtype=np.int64)


def _ring_points(g, directions):
    center = np.asarray(g.pupil_center)
    inner = center + (g.pupil_diameter / 2.0) * directions
    outer = center + g.iris_exit(directions)[:, None] * directions
    pts = np.empty((2 * len(directions), 2))
    pts[0::2] = inner
    pts[1::2] = outer
    return pts


def build_mesh(g, tex):
    """Ring mesh for geometry `g`, texture-mapped from `tex`'s photographed
    circles (pupil border to inner ring, iris border to outer ring)."""
    theta = np.deg2rad(np.arange(N_SPOKES) * SPOKE_STEP_DEG)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    positions = _ring_points(g, dirs)
    uv = tex.to_uv(_ring_points(tex.reference, dirs))
    return IrisMesh(_readonly(positions), _readonly(uv),
                    _readonly(_strip_triangles(N_SPOKES)), _readonly(dirs))


def deform_mesh(m, g, new_diameter):
    """Move the inner ring to radius ``new_diameter / 2`` around the pupil
    centre. The outer ring, connectivity and texture coordinates are
    shared unchanged."""
    g.with_pupil_diameter(new_diameter)  # validates range and containment
    positions = np.array(m.positions)
    positions[0::2] = np.asarray(g.pupil_center) + (new_diameter / 2.0) * m.directions
    return IrisMesh(_readonly(positions), m.uv, m.triangles, m.directions)


def signed_areas(m):
    p = m.positions[m.triangles]
    a, b, c = p[:, 0], p[:, 1], p[:, 2]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                  - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def sample_bilinear(image, x, y):
    """Sample `image` at continuous pixel coords with clamp-to-edge."""
    h, w = image.shape[:2]
    x = np.clip(np.asarray(x, dtype=float) - 0.5, 0, w - 1)
    y = np.clip(np.asarray(y, dtype=float) - 0.5, 0, h - 1)
    x0 = np.floor(x).astype(int)
    y0 = np.floor(y).astype(int)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    img = image.astype(float)
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def render_frame(m, tex, width, height, mm_per_px):
    """Rasterize the textured mesh into an RGB image.

    Pixels not covered by the ring (background and pupil) are black.
    """
    if width <= 0 or height <= 0:
        raise ValueError("image size must be positive")
    if not mm_per_px > 0:
        raise ValueError("mm_per_px must be positive")
    out = np.zeros((height, width, 3), dtype=np.uint8)
    px = np.empty_like(m.positions)
    px[:, 0] = width / 2 + m.positions[:, 0] / mm_per_px
    px[:, 1] = height / 2 + m.positions[:, 1] / mm_per_px
    th, tw = tex.shape

    for tri in m.triangles:
        a, b, c = px[tri]
        x_lo = max(int(math.floor(min(a[0], b[0], c[0]))), 0)
        x_hi = min(int(math.ceil(max(a[0], b[0], c[0]))), width)
        y_lo = max(int(math.floor(min(a[1], b[1], c[1]))), 0)
        y_hi = min(int(math.ceil(max(a[1], b[1], c[1]))), height)
        if x_lo >= x_hi or y_lo >= y_hi:
            continue
        area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if area == 0:
            continue
        xs, ys = np.meshgrid(np.arange(x_lo, x_hi) + 0.5, np.arange(y_lo, y_hi) + 0.5)
        w0 = ((b[0] - xs) * (c[1] - ys) - (b[1] - ys) * (c[0] - xs)) / area
        w1 = ((c[0] - xs) * (a[1] - ys) - (c[1] - ys) * (a[0] - xs)) / area
        w2 = 1.0 - w0 - w1
        eps = -1e-9
        inside = (w0 >= eps) & (w1 >= eps) & (w2 >= eps)
        if not inside.any():
            continue
        uv = (w0[inside, None] * m.uv[tri[0]] + w1[inside, None] * m.uv[tri[1]]
              + w2[inside, None] * m.uv[tri[2]])
        rgb = sample_bilinear(tex.image, uv[:, 0] * tw, uv[:, 1] * th)
        out[ys[inside].astype(int), xs[inside].astype(int)] = np.clip(
            np.rint(rgb), 0, 255).astype(np.uint8)
    return out


def write_ppm(path, image):
    """Write an RGB uint8 array as binary PPM (P6, maxval 255)."""
    Image.fromarray(np.asarray(image, dtype=np.uint8), "RGB").save(path, format="PPM")


def read_image(path, mode="RGB"):
    return np.asarray(Image.open(path).convert(mode))


def synthetic_texture(size=256, pupil_diameter=2.5, seed=0):
    """A procedurally streaked iris photograph for demos and tests."""
    rng = np.random.default_rng(seed)
    ref = IrisGeometry(pupil_diameter=pupil_diameter)
    mm_per_px = 2 * ref.iris_radius / size
    c = (np.arange(size) + 0.5 - size / 2) * mm_per_px
    X, Y = np.meshgrid(c, c)
    r = np.hypot(X, Y)
    theta = np.arctan2(Y, X)
    k = rng.integers(20, 40)
    streaks = 0.5 + 0.5 * np.sin(k * theta + 3 * np.sin(r))
    base = np.array([70, 110, 150], dtype=float)
    img = base[None, None, :] * (0.6 + 0.4 * streaks[..., None])
    img[r < pupil_diameter / 2] = 0
    img[r > ref.iris_radius] = 230
    return IrisTexture(np.clip(img, 0, 255).astype(np.uint8), ref, mm_per_px)
