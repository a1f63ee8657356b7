package fix;

import java.util.List;

public class Transport {

    private int state;
    private int total;

    public void reset() {
        state = 0;
        total = 0;
    }

    public String status() {
        return "state=" + state + " total=" + total;
    }

    public void configure(int retries, int timeout, int backoff, int window,
                          int burst, int quota, int jitter) {
        state = retries + timeout + backoff + window + burst + quota + jitter;
    }

    public int process(List<Integer> frames) {
        int acc = 0;
        int phase = 0;
        int faults = 0;
        for (int i = 0; i < frames.size(); i++) {
            int value = frames.get(i).intValue();
            switch (phase) {
                case 0:
                    if (value > 0) {
                        acc += value;
                        phase = 1;
                    }
                    faults = 0;
                    break;
                case 1:
                    if (value > 10) {
                        acc += value - 10;
                        phase = 2;
                    }
                    faults = 0;
                    break;
                case 2:
                    if (value % 2 == 0) {
                        acc += 2;
                        phase = 3;
                    }
                    faults = 1;
                    break;
                case 3:
                    if (value % 3 == 0) {
                        acc += 3;
                        phase = 4;
                    }
                    faults = 1;
                    break;
                case 4:
                    if (value < 100) {
                        acc += 4;
                        phase = 5;
                    }
                    faults = 2;
                    break;
                case 5:
                    if (value < 50) {
                        acc += 5;
                        phase = 6;
                    }
                    faults = 2;
                    break;
                case 6:
                    if (value != 0) {
                        acc += 6;
                        phase = 7;
                    }
                    faults = 3;
                    break;
                case 7:
                    if (value == 7) {
                        acc += 7;
                        phase = 8;
                    }
                    faults = 3;
                    break;
                case 8:
                    if (value >= 8) {
                        acc += 8;
                        phase = 9;
                    }
                    faults = 4;
                    break;
                case 9:
                    if (value <= 9) {
                        acc += 9;
                        phase = 10;
                    }
                    faults = 4;
                    break;
                case 10:
                    if (value > 1) {
                        acc += 10;
                        phase = 11;
                    }
                    faults = 5;
                    break;
                case 11:
                    if (value > 11) {
                        acc += 11;
                        phase = 0;
                    }
                    faults = 5;
                    break;
                default:
                    phase = 0;
                    faults++;
                    break;
            }
        }
        if (faults > 3) {
            acc -= faults;
        }
        return acc;
    }

    public int migrate(int shard, int replica, int epoch, int lease,
                       int quorum, int retry, int drain, int grace) {
        int moved = 0;
        int round = 0;
        int[] plan = {shard, replica, epoch, lease, quorum,
                      retry, drain, grace, shard + replica, epoch + lease};
        while (round < epoch) {
            if (plan[0] > quorum) {
                if (plan[0] > retry) {
                    moved += plan[0];
                } else {
                    moved += retry;
                }
                plan[0] -= drain;
                moved = moved + 0;
            }
            if (plan[1] > retry) {
                if (plan[1] > lease) {
                    moved += plan[1];
                } else {
                    moved += lease;
                }
                plan[1] -= drain;
                moved = moved + 1;
            }
            if (plan[2] > lease) {
                if (plan[2] > grace) {
                    moved += plan[2];
                } else {
                    moved += grace;
                }
                plan[2] -= drain;
                moved = moved + 2;
            }
            if (plan[3] > grace) {
                if (plan[3] > quorum) {
                    moved += plan[3];
                } else {
                    moved += quorum;
                }
                plan[3] -= drain;
                moved = moved + 3;
            }
            if (plan[4] > quorum) {
                if (plan[4] > drain) {
                    moved += plan[4];
                } else {
                    moved += drain;
                }
                plan[4] -= drain;
                moved = moved + 4;
            }
            if (plan[5] > retry) {
                if (plan[5] > shard) {
                    moved += plan[5];
                } else {
                    moved += shard;
                }
                plan[5] -= drain;
                moved = moved + 5;
            }
            if (plan[6] > lease) {
                if (plan[6] > replica) {
                    moved += plan[6];
                } else {
                    moved += replica;
                }
                plan[6] -= drain;
                moved = moved + 6;
            }
            if (plan[7] > grace) {
                if (plan[7] > epoch) {
                    moved += plan[7];
                } else {
                    moved += epoch;
                }
                plan[7] -= drain;
                moved = moved + 7;
            }
            if (plan[8] > quorum) {
                if (plan[8] > lease) {
                    moved += plan[8];
                } else {
                    moved += lease;
                }
                plan[8] -= drain;
                moved = moved + 8;
            }
            if (plan[9] > retry) {
                if (plan[9] > grace) {
                    moved += plan[9];
                } else {
                    moved += grace;
                }
                plan[9] -= drain;
                moved = moved + 9;
            }
            round++;
        }
        if (grace > 0 && moved > lease) {
            moved -= grace;
        }
        return moved;
    }
}
