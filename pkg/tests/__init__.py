# Prisma Test Suite
