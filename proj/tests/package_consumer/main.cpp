#include <fem/assembly.hpp>
#include <fem/mesh.hpp>

#include <cstdio>

int main()
{
    const fem::FeMesh th(fem::square_mesh({0.0, 1.0, 0.0, 1.0}, 0.5));
    const auto A = fem::compress(fem::assemble_scalar_2d(
        th, fem::VarForm::bilinear({1.0}, {"v.val"}, {"u.val"}), fem::FeSpace(1), fem::FeSpace(1), 2));
    std::printf("%d\n", static_cast<int>(A.rows()));
    return A.rows() == 9 ? 0 : 1;
}
