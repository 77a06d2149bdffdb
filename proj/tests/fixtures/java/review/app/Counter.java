package app;

public class Counter {
    private int count;

    public void increment() {
        if (count < 10) {
            count++;
        }
    }
}
