#ifndef FB_GRID_HPP
#define FB_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fb {

using Field = std::vector<double>;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class GridKind { Rect2D, Radial };
enum class MaskShape { Box, Disk };

/// Node-indexed discretization of the domain. Rect2D is a tensor grid on a
/// box (optionally masked to the inscribed disk); Radial is a 1-D grid of
/// radii for rotationally symmetric problems in dimension 2 or 3, with a
/// symmetry condition at r = 0 and a Dirichlet node at r = R.
///
/// Every node carries a quadrature weight w[k] (its cell volume). The
/// Laplacian below is the exact gradient of the edge-sum Dirichlet energy
/// with respect to these weights, so functional values, residuals and the
/// stencil are mutually consistent.
struct Grid {
    GridKind kind = GridKind::Rect2D;
    int dim = 2;

    // Rect2D
    int nx = 0, ny = 0;
    double ax = 0, bx = 0, ay = 0, by = 0;
    double hx = 0, hy = 0;
    MaskShape mask_shape = MaskShape::Box;

    // Radial
    int nr = 0;
    double radius = 0;
    double hr = 0;

    std::vector<std::uint8_t> dirichlet; // 1 on boundary/masked nodes
    std::vector<double> w;               // nodal cell volumes

    static Grid rect2d(int nx, int ny, double ax, double bx, double ay, double by,
                       MaskShape mask = MaskShape::Box);
    static Grid radial(int dim, double radius, int n);

    std::size_t size() const { return dirichlet.size(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    double x_of(int i) const { return ax + i * hx; }
    double y_of(int j) const { return ay + j * hy; }
    double r_of(int i) const { return i * hr; }
    Point coords(std::size_t k) const;
    bool is_interior(std::size_t k) const { return dirichlet[k] == 0; }
    double min_h() const;
    double volume() const; // sum of cell volumes

    Field zero_field() const { return Field(size(), 0.0); }
};

/// Pointwise discrete Laplacian Δ_h u; zero on Dirichlet nodes.
/// Rect2D: 5-point stencil. Radial: conservative flux form with exact shell
/// volumes (exact on quadratics, symmetric in the w-weighted inner product).
Field laplacian_apply(const Grid& g, const Field& u);
void laplacian_into(const Grid& g, const Field& u, Field& out);

/// Edge-sum bilinear Dirichlet form a(u,v) ~ ∫ ∇u·∇v. For fields vanishing
/// on Dirichlet nodes, a(u,v) = <-Δ_h u, v>_w exactly.
double dirichlet_form(const Grid& g, const Field& u, const Field& v);
double dirichlet_energy(const Grid& g, const Field& u); // (1/2) a(u,u)

/// Cell-volume weighted quadrature Σ w_k f_k.
double integrate(const Grid& g, const Field& f);

/// Weighted inner product and norm on fields (the discrete L² pairing).
double dot_w(const Grid& g, const Field& a, const Field& b);
double norm_w(const Grid& g, const Field& a);

/// Centered-difference nodal gradient; one-sided at the grid edge.
/// Radial grids use gy = 0 and gx = du/dr (zero at r = 0 by symmetry).
void gradient_field(const Grid& g, const Field& u, Field& gx, Field& gy);

/// Pointwise |∇u| from gradient_field.
Field gradient_magnitude(const Grid& g, const Field& u);

/// Bilinear (Rect2D) or linear-in-r (Radial) interpolation at a physical
/// point. Clamps to the bounding box.
double interp(const Grid& g, const Field& u, double px, double py);

/// Zero the field on Dirichlet nodes.
void apply_dirichlet(const Grid& g, Field& u);

// Serialization: CSV (human readable, bit-exact via %.17g) and a
// little-endian binary block. Both round-trip exactly.
void write_field_csv(const std::string& path, const Grid& g, const Field& u,
                     std::uint64_t config_hash = 0);
Field read_field_csv(const std::string& path, const Grid& g);
void write_field_bin(const std::string& path, const Grid& g, const Field& u,
                     std::uint64_t config_hash = 0);
Field read_field_bin(const std::string& path, const Grid& g);

} // namespace fb

#endif
