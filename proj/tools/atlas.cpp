#include <iostream>

int main() {
    std::cout << "atlas: placeholder\n";
    return 0;
}
