#include <cstdio>

int main() {
    std::puts("surveysim CLI placeholder");
    return 0;
}
