import { defineConfig } from 'vitest/config';
import { SERVICE_URL } from './tests/service';

export default defineConfig({
  test: {
    environment: 'happy-dom',
    // the document lives on the service origin, as it does when served
    environmentOptions: { happyDOM: { url: SERVICE_URL } },
    globalSetup: ['./tests/global-setup.ts'],
    fileParallelism: false,
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
