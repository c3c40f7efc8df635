#include "potts/landscape.hpp"

int main() { return potts::critical_points({2.4, 0, 0}).size() == 7 ? 0 : 1; }
