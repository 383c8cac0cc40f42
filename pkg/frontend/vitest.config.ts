import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'node',
    testTimeout: 30000,
    hookTimeout: 60000,
    // The e2e suite owns one shared service process; run files serially.
    fileParallelism: false,
  },
});
